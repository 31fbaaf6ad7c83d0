#pragma once

#include "sneed/block.hpp"
#include "sneed/code.hpp"
#include "sneed/digest.hpp"
#include "sneed/errors.hpp"
#include "sneed/field.hpp"
#include "sneed/matrix.hpp"
#include "sneed/netsim.hpp"
#include "sneed/packet.hpp"
#include "sneed/rational.hpp"
#include "sneed/report.hpp"
#include "sneed/rotation.hpp"
#include "sneed/shard.hpp"
