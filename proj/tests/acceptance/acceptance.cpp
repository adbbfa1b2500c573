// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line each. Optional arguments select criteria by number.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "rdfront/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= rdfront::AcceptanceSuite::kCount; ++i) ids.push_back(i);

  rdfront::AcceptanceSuite suite{rdfront::AcceptanceParams{}};
  int failed = 0;
  for (int id : ids) {
    const auto r = suite.run(id);
    std::cout << rdfront::format_result_line(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (ids.size() - static_cast<std::size_t>(failed)) << "/" << ids.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
