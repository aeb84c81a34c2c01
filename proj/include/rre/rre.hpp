#pragma once

#include "rre/annotation.hpp"
#include "rre/common.hpp"
#include "rre/eval_detection.hpp"
#include "rre/eval_e2e.hpp"
#include "rre/eval_recognition.hpp"
#include "rre/geometry.hpp"
#include "rre/leaderboard.hpp"
#include "rre/text_metrics.hpp"
#include "rre/version.hpp"
