#pragma once

// Umbrella header: the exchange-calculus core, the self-stabilizing
// operators, aggregate processes, the task-assignment layer, and the
// simulation / transport / gateway surroundings.

#include "xcs/literal.hpp"
#include "xcs/nvalue.hpp"
#include "xcs/path.hpp"
#include "xcs/context.hpp"
#include "xcs/round.hpp"
#include "xcs/process.hpp"
#include "xcs/operators.hpp"
#include "xcs/mrta.hpp"
#include "xcs/lockstep.hpp"
#include "xcs/serialize.hpp"
#include "xcs/transport.hpp"
#include "xcs/gateway.hpp"
#include "xcs/scenario.hpp"
#include "xcs/sim.hpp"
#include "xcs/node.hpp"
