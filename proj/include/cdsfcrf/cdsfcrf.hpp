#pragma once

#include "energy.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "keyvalue.hpp"
#include "metrics.hpp"
#include "optimizer.hpp"
#include "phantom.hpp"
#include "transform.hpp"
