#pragma once

#include "paperplan/array.hpp"
#include "paperplan/bench.hpp"
#include "paperplan/instances.hpp"
#include "paperplan/master.hpp"
#include "paperplan/planner.hpp"
#include "paperplan/pricing.hpp"
#include "paperplan/solvekit.hpp"
