#pragma once

#include "graspkit/capture.hpp"
#include "graspkit/context.hpp"
#include "graspkit/engine.hpp"
#include "graspkit/error.hpp"
#include "graspkit/events.hpp"
#include "graspkit/gesture.hpp"
#include "graspkit/grab.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/io.hpp"
#include "graspkit/latin_square.hpp"
#include "graspkit/pinch.hpp"
#include "graspkit/protocol_script.hpp"
#include "graspkit/scene.hpp"
#include "graspkit/sim.hpp"
#include "graspkit/stats.hpp"
#include "graspkit/synth.hpp"
