#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "waveguide/geometry.hpp"

namespace wg::cli {

// Fully resolved invocation settings. Values come from built-in defaults,
// then the optional --config JSON document (fields alpha, beta, L, b), then
// explicit flags, in that order of precedence. Angles are radians.
struct RunConfig {
    ModelParams model;
    double emin = 1e-4;
    double emax = 5e-2;
    std::size_t grid_points = 400;
    std::string out_dir = ".";
    long seed = 0;
    unsigned workers = 1;

    void validate() const; // throws InvalidParams
};

// Dispatches one subcommand among {one-turn, boundary, oracle, tunnel,
// sphaleron, validate} and emits CSV tables (12 significant digits, header
// row plus a comment line recording the config) with JSON mirrors into the
// output directory (--out, else WAVEGUIDE_OUTPUT_DIR, else the working
// directory). Returns 0 on success, 2 on a configuration or usage error and
// 1 on a solver failure; failures print a machine-readable JSON object with
// the error kind and message to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Same, bound to std::cout / std::cerr.
int run(const std::vector<std::string>& args);

} // namespace wg::cli
