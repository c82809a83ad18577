#pragma once

#include <iosfwd>
#include <string>

#include "sigmalab/excursion.hpp"
#include "sigmalab/types.hpp"

namespace sigmalab::io {

// CSV: header `t,value` or `t,x,m,v`, one row per grid index, doubles in
// shortest round-trip form. The grid is recovered from the row count and t_1.
void write_csv(std::ostream& os, const Path& p);
void write_csv(std::ostream& os, const DecomposedPath& p);
Path read_path_csv(std::istream& is);
DecomposedPath read_decomposed_csv(std::istream& is);

// Binary: "SLAB1", u8 kind (1 = Path, 3 = DecomposedPath), f64 dt,
// u64 n_steps, then each column as n_steps+1 little-endian f64.
void write_binary(std::ostream& os, const Path& p);
void write_binary(std::ostream& os, const DecomposedPath& p);
Path read_path_binary(std::istream& is);
DecomposedPath read_decomposed_binary(std::istream& is);

// `g_index,d_index,sign,unfinished`
void write_csv(std::ostream& os, const excursion::ExcursionSet& exc);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

void save(const std::string& file, const Path& p);
void save(const std::string& file, const DecomposedPath& p);

} // namespace sigmalab::io
