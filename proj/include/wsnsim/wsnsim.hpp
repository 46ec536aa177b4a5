#pragma once

// Umbrella header: the whole toolkit in one include.

#include "wsnsim/bitstring.hpp"
#include "wsnsim/channel.hpp"
#include "wsnsim/config.hpp"
#include "wsnsim/crc.hpp"
#include "wsnsim/energy.hpp"
#include "wsnsim/events.hpp"
#include "wsnsim/expected.hpp"
#include "wsnsim/experiments.hpp"
#include "wsnsim/packet.hpp"
#include "wsnsim/radio.hpp"
#include "wsnsim/rng.hpp"
#include "wsnsim/shockburst.hpp"
#include "wsnsim/simulation.hpp"
