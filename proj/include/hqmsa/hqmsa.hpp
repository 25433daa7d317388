#pragma once

#include "hqmsa/error.hpp"
#include "hqmsa/rng.hpp"
#include "hqmsa/align_core.hpp"
#include "hqmsa/fasta.hpp"
#include "hqmsa/scoring.hpp"
#include "hqmsa/statevector.hpp"
#include "hqmsa/circuit.hpp"
#include "hqmsa/sampling.hpp"
#include "hqmsa/cvar.hpp"
#include "hqmsa/gradient.hpp"
#include "hqmsa/problem.hpp"
#include "hqmsa/optimizer.hpp"
#include "hqmsa/oracle.hpp"
#include "hqmsa/stats.hpp"
#include "hqmsa/instances.hpp"
#include "hqmsa/config.hpp"
#include "hqmsa/study.hpp"
#include "hqmsa/report.hpp"
