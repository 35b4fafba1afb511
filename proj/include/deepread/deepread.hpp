#pragma once

// Umbrella header.

#include "deepread/action.hpp"
#include "deepread/agent.hpp"
#include "deepread/chat.hpp"
#include "deepread/entities.hpp"
#include "deepread/error.hpp"
#include "deepread/eval.hpp"
#include "deepread/index.hpp"
#include "deepread/markdown.hpp"
#include "deepread/remote_ranker.hpp"
#include "deepread/retrieval.hpp"
#include "deepread/tools.hpp"
#include "deepread/version.hpp"
