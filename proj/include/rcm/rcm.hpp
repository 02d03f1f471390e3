#pragma once

#include "rcm/connection.hpp"
#include "rcm/ensemble.hpp"
#include "rcm/errors.hpp"
#include "rcm/experiments.hpp"
#include "rcm/geometry.hpp"
#include "rcm/graph.hpp"
#include "rcm/numeric.hpp"
#include "rcm/oracle.hpp"
#include "rcm/persist.hpp"
#include "rcm/random.hpp"
#include "rcm/theory.hpp"
#include "rcm/union_find.hpp"
#include "rcm/version.hpp"
