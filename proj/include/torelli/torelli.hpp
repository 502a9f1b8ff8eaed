// Umbrella header.
#pragma once

#include "torelli/core.hpp"
#include "torelli/fatgraph.hpp"
#include "torelli/marking.hpp"
#include "torelli/exterior.hpp"
#include "torelli/cocycle.hpp"
#include "torelli/free_group.hpp"
#include "torelli/lie.hpp"
#include "torelli/nilpotent.hpp"
#include "torelli/census.hpp"
