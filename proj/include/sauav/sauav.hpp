#pragma once

// Umbrella header.

#include "sauav/adversary.hpp"
#include "sauav/agent_codec.hpp"
#include "sauav/auth.hpp"
#include "sauav/code_chain.hpp"
#include "sauav/counters.hpp"
#include "sauav/detection.hpp"
#include "sauav/energy.hpp"
#include "sauav/event_queue.hpp"
#include "sauav/group.hpp"
#include "sauav/keyed_hash.hpp"
#include "sauav/metrics.hpp"
#include "sauav/mobility.hpp"
#include "sauav/neighbor_matrix.hpp"
#include "sauav/packet.hpp"
#include "sauav/radio.hpp"
#include "sauav/registration.hpp"
#include "sauav/report_io.hpp"
#include "sauav/rng.hpp"
#include "sauav/scenario.hpp"
#include "sauav/simulation.hpp"
#include "sauav/sweep.hpp"
#include "sauav/time.hpp"
#include "sauav/toml.hpp"
#include "sauav/trace.hpp"
#include "sauav/verify.hpp"
