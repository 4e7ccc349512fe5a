#pragma once

#include "marsupial/geometry.hpp"
#include "marsupial/rect_index.hpp"
#include "marsupial/pva2d.hpp"
#include "marsupial/catenary.hpp"
#include "marsupial/pva3d.hpp"
#include "marsupial/planner.hpp"
#include "marsupial/rng.hpp"
#include "marsupial/baseline.hpp"
#include "marsupial/scenario.hpp"
#include "marsupial/oracle.hpp"
#include "marsupial/scene_io.hpp"
#include "marsupial/svg.hpp"
