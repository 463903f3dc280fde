#pragma once

#include "stellar/config.hpp"
#include "stellar/embed.hpp"
#include "stellar/error.hpp"
#include "stellar/evalkit.hpp"
#include "stellar/fingerprint.hpp"
#include "stellar/http_transport.hpp"
#include "stellar/kb.hpp"
#include "stellar/llm_gateway.hpp"
#include "stellar/pathcount.hpp"
#include "stellar/pipeline.hpp"
#include "stellar/promptkit.hpp"
#include "stellar/rtl_ast.hpp"
#include "stellar/rtl_parser.hpp"
#include "stellar/rtl_print.hpp"
#include "stellar/sva.hpp"
#include "stellar/vindex.hpp"
