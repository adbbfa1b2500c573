#pragma once

#include "rdfront/error.hpp"
#include "rdfront/numeric.hpp"
#include "rdfront/reaction.hpp"
#include "rdfront/snapshot.hpp"
#include "rdfront/crossing.hpp"
#include "rdfront/solver.hpp"
#include "rdfront/profiles.hpp"
#include "rdfront/fronts.hpp"
#include "rdfront/parallel.hpp"
#include "rdfront/spreading.hpp"
#include "rdfront/wavelimit.hpp"
#include "rdfront/config.hpp"
#include "rdfront/io.hpp"
#include "rdfront/acceptance.hpp"
#include "rdfront/experiments.hpp"
