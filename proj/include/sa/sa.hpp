#pragma once

#include "answer_compiler.hpp"
#include "channel.hpp"
#include "doc_index.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "fact_store.hpp"
#include "oracle.hpp"
#include "ordering.hpp"
#include "parser.hpp"
#include "prefix.hpp"
#include "provenance.hpp"
#include "saturation.hpp"
#include "subsumption.hpp"
#include "symbols.hpp"
#include "term.hpp"
#include "unify.hpp"
