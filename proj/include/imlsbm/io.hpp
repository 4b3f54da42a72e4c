// Copyright 2026 The imlsbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMLSBM_IO_HPP_
#define IMLSBM_IO_HPP_

// Plain-text persistence for instances, parameters and detection results.
//
// Instance file:
//   n L rho seed
//   layer l p_l q_l        (one block per layer, followed by its edges)
//   i j                    (0-based, i < j)
//   z_star s_0 ... s_{n-1}
//   z_layer l s_0 ... s_{n-1}
//
// A parameter file is the same header and layer lines without edges or
// labels; read_params() accepts either.

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "imlsbm/error.hpp"
#include "imlsbm/model.hpp"

namespace imlsbm {

// Shortest representation that parses back to the same double.
inline std::string format_double(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

namespace detail {

inline double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) {
    throw IoError(where + ": expected a number, got '" + token + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& token, const std::string& where) {
  Int value = 0;
  const char* first = token.data();
  const char* last = first + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) {
    throw IoError(where + ": expected an integer, got '" + token + "'");
  }
  return value;
}

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

inline void write_labels(std::ostream& out, std::span<const int> labels) {
  for (int s : labels) out << ' ' << (s == 1 ? "1" : "-1");
}

inline Assignment parse_labels(const std::vector<std::string>& tokens,
                               std::size_t first, std::size_t n,
                               const std::string& where) {
  if (tokens.size() != first + n) {
    throw IoError(where + ": expected " + std::to_string(n) + " labels");
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int s = parse_integer<int>(tokens[first + i], where);
    if (s != 1 && s != -1) throw IoError(where + ": label must be 1 or -1");
    labels[i] = s;
  }
  return Assignment(std::move(labels));
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

inline void finish_output(std::ofstream& out,
                          const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline void write_sample(std::ostream& out, const SampleRecord& record) {
  const ModelParams& params = record.params;
  out << params.n << ' ' << params.L << ' ' << format_double(params.rho)
      << ' ' << record.seed << '\n';
  for (std::size_t l = 0; l < params.L; ++l) {
    out << "layer " << l << ' ' << format_double(params.p[l]) << ' '
        << format_double(params.q[l]) << '\n';
    for (const Edge& e : record.graph.edges(l)) {
      out << e.first << ' ' << e.second << '\n';
    }
  }
  out << "z_star";
  detail::write_labels(out, record.z_star.labels());
  out << '\n';
  for (std::size_t l = 0; l < record.z_layers.size(); ++l) {
    out << "z_layer " << l;
    detail::write_labels(out, record.z_layers[l].labels());
    out << '\n';
  }
}

inline void write_sample(const std::filesystem::path& path,
                         const SampleRecord& record) {
  std::ofstream out = detail::open_output(path);
  write_sample(out, record);
  detail::finish_output(out, path);
}

namespace detail {

struct ParsedInstance {
  ModelParams params;
  std::uint64_t seed = 0;
  std::vector<std::vector<Edge>> edges;
  std::vector<std::string> z_star;
  std::vector<std::vector<std::string>> z_layers;
  bool has_labels = false;
};

inline ParsedInstance parse_instance(std::istream& in,
                                     const std::string& name) {
  ParsedInstance parsed;
  std::string line;
  std::size_t line_no = 0;
  auto where = [&] { return name + ":" + std::to_string(line_no); };
  bool have_header = false;
  long current = -1;
  std::vector<std::uint8_t> seen_layer;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (!have_header) {
      if (tokens.size() != 3 && tokens.size() != 4) {
        throw IoError(where() + ": header must be 'n L rho [seed]'");
      }
      parsed.params.n = parse_integer<std::size_t>(tokens[0], where());
      parsed.params.L = parse_integer<std::size_t>(tokens[1], where());
      parsed.params.rho = parse_double(tokens[2], where());
      if (tokens.size() == 4) {
        parsed.seed = parse_integer<std::uint64_t>(tokens[3], where());
      }
      if (parsed.params.n == 0 || parsed.params.L == 0) {
        throw IoError(where() + ": n and L must be positive");
      }
      parsed.params.p.assign(parsed.params.L, 0.0);
      parsed.params.q.assign(parsed.params.L, 0.0);
      parsed.edges.resize(parsed.params.L);
      parsed.z_layers.resize(parsed.params.L);
      seen_layer.assign(parsed.params.L, 0);
      have_header = true;
      continue;
    }
    const std::size_t n = parsed.params.n;
    const std::size_t L = parsed.params.L;
    if (tokens[0] == "layer") {
      if (tokens.size() != 4) {
        throw IoError(where() + ": layer line must be 'layer l p q'");
      }
      const auto l = parse_integer<std::size_t>(tokens[1], where());
      if (l >= L || seen_layer[l]) {
        throw IoError(where() + ": bad or repeated layer index");
      }
      seen_layer[l] = 1;
      parsed.params.p[l] = parse_double(tokens[2], where());
      parsed.params.q[l] = parse_double(tokens[3], where());
      current = static_cast<long>(l);
    } else if (tokens[0] == "z_star") {
      parsed.z_star = tokens;
      parsed.has_labels = true;
      current = -1;
    } else if (tokens[0] == "z_layer") {
      if (tokens.size() < 2) throw IoError(where() + ": missing layer index");
      const auto l = parse_integer<std::size_t>(tokens[1], where());
      if (l >= L) throw IoError(where() + ": layer index out of range");
      parsed.z_layers[l] = tokens;
      current = -1;
    } else {
      if (tokens.size() != 2 || current < 0) {
        throw IoError(where() + ": unexpected line '" + line + "'");
      }
      const auto i = parse_integer<std::uint32_t>(tokens[0], where());
      const auto j = parse_integer<std::uint32_t>(tokens[1], where());
      if (i >= j || j >= n) {
        throw IoError(where() + ": edge must satisfy 0 <= i < j < n");
      }
      parsed.edges[static_cast<std::size_t>(current)].emplace_back(i, j);
    }
  }
  if (!have_header) throw IoError(name + ": empty file");
  for (std::size_t l = 0; l < parsed.params.L; ++l) {
    if (!seen_layer[l]) {
      throw IoError(name + ": missing block for layer " + std::to_string(l));
    }
  }
  return parsed;
}

}  // namespace detail

inline ModelParams read_params(std::istream& in,
                               const std::string& name = "<params>") {
  ModelParams params = detail::parse_instance(in, name).params;
  try {
    params.validate();
  } catch (const ParameterError& e) {
    throw IoError(name + ": " + e.what());
  }
  return params;
}

inline ModelParams read_params(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_params(in, path.string());
}

inline void write_params(std::ostream& out, const ModelParams& params) {
  out << params.n << ' ' << params.L << ' ' << format_double(params.rho)
      << '\n';
  for (std::size_t l = 0; l < params.L; ++l) {
    out << "layer " << l << ' ' << format_double(params.p[l]) << ' '
        << format_double(params.q[l]) << '\n';
  }
}

inline SampleRecord read_sample(std::istream& in,
                                const std::string& name = "<instance>") {
  detail::ParsedInstance parsed = detail::parse_instance(in, name);
  const std::size_t n = parsed.params.n;
  if (!parsed.has_labels) throw IoError(name + ": missing z_star line");
  SampleRecord record;
  record.params = parsed.params;
  record.seed = parsed.seed;
  record.z_star = detail::parse_labels(parsed.z_star, 1, n, name + ": z_star");
  for (std::size_t l = 0; l < parsed.params.L; ++l) {
    const std::string where = name + ": z_layer " + std::to_string(l);
    if (parsed.z_layers[l].empty()) throw IoError(where + " missing");
    record.z_layers.push_back(
        detail::parse_labels(parsed.z_layers[l], 2, n, where));
  }
  record.flip_counts.assign(parsed.params.L, 0);
  for (std::size_t l = 0; l < parsed.params.L; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      record.flip_counts[l] += record.z_layers[l][i] != record.z_star[i];
    }
  }
  try {
    record.graph = MultilayerGraph(n, parsed.edges);
  } catch (const ParameterError& e) {
    throw IoError(name + ": " + e.what());
  }
  return record;
}

inline SampleRecord read_sample(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  return read_sample(in, path.string());
}

}  // namespace imlsbm

#endif  // IMLSBM_IO_HPP_
