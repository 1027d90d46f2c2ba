#pragma once

#include "jumps/energy.hpp"
#include "jumps/geometry.hpp"
#include "jumps/harness.hpp"
#include "jumps/io.hpp"
#include "jumps/protocol.hpp"
#include "jumps/random.hpp"
#include "jumps/stats.hpp"
#include "jumps/topology.hpp"
#include "jumps/zones.hpp"
