#pragma once

#include "topab/error.hpp"
#include "topab/group.hpp"
#include "topab/topology.hpp"
#include "topab/extension.hpp"
#include "topab/square.hpp"
#include "topab/duality.hpp"
#include "topab/snake.hpp"
#include "topab/diagram.hpp"
#include "topab/family.hpp"
#include "topab/theorems.hpp"
#include "topab/json.hpp"
#include "topab/search.hpp"
#include "topab/report.hpp"
