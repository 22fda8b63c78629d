#pragma once

// Plain-text formats for every library input and output. Floats are written
// in the shortest form that re-parses bit-exactly. `#` starts a comment.

#include <string>
#include <string_view>

#include "ffsing/fibrlab.hpp"
#include "ffsing/moduli.hpp"

namespace ffsing {

// "order k" followed by one "p q re im" line per nonzero coefficient.
Jet2 parse_jet(std::string_view text);
std::string format_jet(const Jet2& jet);

// "order4 k" followed by one "a b c d re im" line per nonzero coefficient.
Jet4 parse_jet4(std::string_view text);
std::string format_jet4(const Jet4& jet);

// "component 1" and "component 2", each followed by a Jet4 block.
std::string format_lift(const LiftPair& lift);

// "n <int> order <int>" followed by n - 1 jet blocks.
GluingTuple parse_gluing_tuple(std::string_view text);
std::string format_gluing_tuple(const GluingTuple& tuple);

// "gauge n <int> order <int>" followed by n jet blocks.
GaugeTuple parse_gauge_tuple(std::string_view text);
std::string format_gauge_tuple(const GaugeTuple& tuple);

// "hessian" followed by the 16 entries of q1 then the 16 of q2, row-major.
HessianForm parse_hessian(std::string_view text);
std::string format_hessian(const HessianForm& h);

// Literals such as 1, -2.5, 3i, -i, 0.5+2i, 1e-3-4e2i.
Complex parse_complex(std::string_view text);
std::string format_complex(Complex c);

std::string format_double(double x);
double parse_double(std::string_view text);
std::string format_real(Real x);
Real parse_real(std::string_view text);

// family n_points 2 t_min <f> t_max <f>
// point 1
// center x1 x2 x3 x4          (optional, default 0)
// radius r                    (optional, default 1)
// frame [degree m]            then 4 (m + 1) rows of 4 numbers
// chart order k
// p q : re0 im0 re1 im1 ...   (coefficients of t^0, t^1, ...)
// end
Rank1Family parse_family(std::string_view text);
std::string format_family(const Rank1Family& family);

// One TSV row per sample under a commented header.
std::string format_profile(const Profile& profile, ProfileRoute route);
Profile parse_profile(std::string_view text);

// Whole file as a string; throws IoError.
std::string read_file(const std::string& path);

}  // namespace ffsing
