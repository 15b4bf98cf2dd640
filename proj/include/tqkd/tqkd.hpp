#pragma once

#include "tqkd/attack.hpp"
#include "tqkd/channel.hpp"
#include "tqkd/errors.hpp"
#include "tqkd/linalg.hpp"
#include "tqkd/mub.hpp"
#include "tqkd/protocol.hpp"
#include "tqkd/rng.hpp"
#include "tqkd/security.hpp"
#include "tqkd/tomography.hpp"
