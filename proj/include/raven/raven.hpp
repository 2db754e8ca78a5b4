#pragma once

#include "raven/domain.hpp"
#include "raven/oracle.hpp"
#include "raven/generator.hpp"
#include "raven/lexicon.hpp"
#include "raven/encoder.hpp"
#include "raven/prompt_parser.hpp"
#include "raven/scorer.hpp"
#include "raven/http_backend.hpp"
#include "raven/harness.hpp"
