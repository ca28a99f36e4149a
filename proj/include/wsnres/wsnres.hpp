#pragma once

#include "wsnres/adversary.hpp"
#include "wsnres/common.hpp"
#include "wsnres/engine.hpp"
#include "wsnres/experiment.hpp"
#include "wsnres/metrics.hpp"
#include "wsnres/packet.hpp"
#include "wsnres/protocols.hpp"
#include "wsnres/random.hpp"
#include "wsnres/simulation.hpp"
#include "wsnres/topology.hpp"
