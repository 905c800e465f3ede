#pragma once

#include "idxgram/automata.hpp"
#include "idxgram/common.hpp"
#include "idxgram/counter_machine.hpp"
#include "idxgram/engine.hpp"
#include "idxgram/etol.hpp"
#include "idxgram/grammar.hpp"
#include "idxgram/grammar_io.hpp"
#include "idxgram/report.hpp"
#include "idxgram/semilinear.hpp"
#include "idxgram/trio.hpp"
#include "idxgram/tuple_automaton.hpp"
