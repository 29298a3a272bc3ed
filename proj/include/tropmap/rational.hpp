#ifndef TROPMAP_RATIONAL_HPP
#define TROPMAP_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <optional>
#include <string>
#include <vector>

namespace tropmap {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using IntVec = std::vector<Int>;
using RatVec = std::vector<Rat>;

inline int sgn(const Rat& x) { return x.sign(); }
inline int sgn(const Int& x) { return x.sign(); }

double to_double(const Rat& x);

// Parses "p/q" or "p" (optionally signed); also accepts a plain decimal
// like "0.25" which is converted exactly.
Rat parse_rational(const std::string& s);
std::string format_rational(const Rat& x);

} // namespace tropmap

#endif
