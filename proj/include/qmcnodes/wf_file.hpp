#pragma once

// Wave-function definitions as sectioned key = value text.  A [wavefunction]
// section names the kind, [parameters] carries the exponents and
// coefficients, an optional [jastrow] section wraps the function in a
// correlation factor, and the Hylleraas kinds take their term table from
// [terms].  One shipped example per system lives in wavefunctions/.
//
//   [wavefunction]
//   kind = he_triplet          # hydrogenic_1s | li_rhf | be_hf |
//                              # be_two_config | he_triplet |
//                              # he_triplet_open | li_hylleraas
//   [parameters]
//   alpha = 1.1
//   [terms]
//   term = 0 1 0  0.9876       # i j k coefficient
//
// Term rows are `i j k c` for the two-electron kinds and
// `p1 p2 p3 p12 p13 p23 c` for li_hylleraas.

#include <memory>
#include <string>

#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

/// Builds the wave function a definition describes.  Unknown kinds,
/// sections, or keys, missing parameters, and malformed term rows all throw
/// std::invalid_argument naming the offending location.
std::shared_ptr<const WaveFunction> parse_wavefunction_text(
    const std::string& text, const std::string& source = "<string>");

/// parse_wavefunction_text over a file's contents.
std::shared_ptr<const WaveFunction> load_wavefunction(const std::string& path);

}  // namespace qmcnodes
