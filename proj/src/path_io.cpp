#include "sigmalab/path_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sigmalab::io {

namespace {

constexpr char kMagic[5] = {'S', 'L', 'A', 'B', '1'};

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("csv: bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::vector<double>> read_columns(std::istream& is, std::string_view expected_header,
                                              std::size_t ncols) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("csv: empty input");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != expected_header)
    throw std::invalid_argument("csv: expected header '" + std::string(expected_header) + "', got '" + line + "'");
  std::vector<std::vector<double>> cols(ncols);
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::size_t start = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::size_t comma = line.find(',', start);
      const bool last = c + 1 == ncols;
      if (last != (comma == std::string::npos))
        throw std::invalid_argument("csv: wrong column count in '" + line + "'");
      cols[c].push_back(parse_double(std::string_view(line).substr(start, last ? std::string::npos : comma - start)));
      start = comma + 1;
    }
  }
  if (cols[0].size() < 2)
    throw std::invalid_argument("csv: need at least two rows");
  return cols;
}

TimeGrid grid_from_times(const std::vector<double>& t) {
  if (t[0] != 0.0)
    throw std::invalid_argument("csv: first time must be 0");
  const TimeGrid grid(t[1], t.size() - 1);
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] != grid.time(k))
      throw std::invalid_argument("csv: non-uniform time column at row " + std::to_string(k));
  return grid;
}

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host assumed");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
    throw std::invalid_argument("binary: truncated input");
  return v;
}

void write_header(std::ostream& os, std::uint8_t kind, const TimeGrid& g) {
  os.write(kMagic, sizeof kMagic);
  put<std::uint8_t>(os, kind);
  put<double>(os, g.dt());
  put<std::uint64_t>(os, g.n_steps());
}

TimeGrid read_header(std::istream& is, std::uint8_t expected_kind) {
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
    throw std::invalid_argument("binary: bad magic");
  const auto kind = get<std::uint8_t>(is);
  if (kind != expected_kind)
    throw std::invalid_argument("binary: unexpected record kind " + std::to_string(kind));
  const auto dt = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  return TimeGrid(dt, static_cast<std::size_t>(n));
}

void write_column(std::ostream& os, const Path& p) {
  for (double v : p.values())
    put<double>(os, v);
}

Path read_column(std::istream& is, const TimeGrid& g) {
  std::vector<double> v(g.size());
  for (double& x : v)
    x = get<double>(is);
  return Path(g, std::move(v));
}

} // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& os, const Path& p) {
  os << "t,value\n";
  for (std::size_t k = 0; k < p.size(); ++k)
    os << format_double(p.grid().time(k)) << ',' << format_double(p[k]) << '\n';
}

void write_csv(std::ostream& os, const DecomposedPath& p) {
  p.validate();
  os << "t,x,m,v\n";
  for (std::size_t k = 0; k < p.x.size(); ++k)
    os << format_double(p.grid().time(k)) << ',' << format_double(p.x[k]) << ',' << format_double(p.m[k])
       << ',' << format_double(p.v[k]) << '\n';
}

Path read_path_csv(std::istream& is) {
  auto cols = read_columns(is, "t,value", 2);
  return Path(grid_from_times(cols[0]), std::move(cols[1]));
}

DecomposedPath read_decomposed_csv(std::istream& is) {
  auto cols = read_columns(is, "t,x,m,v", 4);
  const TimeGrid g = grid_from_times(cols[0]);
  DecomposedPath p{Path(g, std::move(cols[1])), Path(g, std::move(cols[2])), Path(g, std::move(cols[3]))};
  p.validate();
  return p;
}

void write_binary(std::ostream& os, const Path& p) {
  write_header(os, 1, p.grid());
  write_column(os, p);
}

void write_binary(std::ostream& os, const DecomposedPath& p) {
  p.validate();
  write_header(os, 3, p.grid());
  write_column(os, p.x);
  write_column(os, p.m);
  write_column(os, p.v);
}

Path read_path_binary(std::istream& is) { return read_column(is, read_header(is, 1)); }

DecomposedPath read_decomposed_binary(std::istream& is) {
  const TimeGrid g = read_header(is, 3);
  Path x = read_column(is, g);
  Path m = read_column(is, g);
  Path v = read_column(is, g);
  DecomposedPath p{std::move(x), std::move(m), std::move(v)};
  p.validate();
  return p;
}

void write_csv(std::ostream& os, const excursion::ExcursionSet& exc) {
  os << "g_index,d_index,sign,unfinished\n";
  for (const auto& iv : exc.intervals)
    os << iv.g << ',' << iv.d << ',' << iv.sign << ',' << (iv.unfinished ? 1 : 0) << '\n';
}

namespace {

template <class T>
void save_impl(const std::string& file, const T& p) {
  const bool binary = file.size() >= 5 && file.compare(file.size() - 5, 5, ".slab") == 0;
  std::ofstream os(file, binary ? std::ios::binary : std::ios::out);
  if (!os)
    throw std::runtime_error("cannot open " + file);
  if (binary)
    write_binary(os, p);
  else
    write_csv(os, p);
}

} // namespace

void save(const std::string& file, const Path& p) { save_impl(file, p); }
void save(const std::string& file, const DecomposedPath& p) { save_impl(file, p); }

} // namespace sigmalab::io
