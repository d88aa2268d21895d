#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <zlib.h>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/ising.hpp"
#include "fluxanneal/md.hpp"
#include "fluxanneal/reducer.hpp"

namespace fluxanneal {

namespace detail {

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Text instance format:
///   ising <N>
///   J <i> <j> <value>   (0-based, i < j, lexicographic order)
///   h <i> <value>       (ascending i)
/// Zero entries are omitted; values carry 17 significant digits so doubles
/// round-trip exactly.
inline void write_instance(std::ostream& out, const IsingProblem& problem) {
  out << "ising " << problem.n_sites() << "\n";
  problem.for_each_coupling([&](int i, int j, double v) {
    out << "J " << i << " " << j << " " << detail::format_g17(v) << "\n";
  });
  for (int i = 0; i < problem.n_sites(); ++i)
    if (problem.field(i) != 0.0)
      out << "h " << i << " " << detail::format_g17(problem.field(i)) << "\n";
}

inline void write_instance_file(const std::string& path, const IsingProblem& problem) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_instance(out, problem);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline IsingProblem read_instance(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<Triplet> triplets;
  std::vector<double> fields;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw ContractViolation("instance line " + std::to_string(line_no) + ": " + why);
    };
    if (tag == "ising") {
      if (n >= 0) fail("duplicate header");
      if (!(ls >> n) || n < 0) fail("bad site count");
      fields.assign(static_cast<std::size_t>(n), 0.0);
    } else if (tag == "J") {
      if (n < 0) fail("J before header");
      int i, j;
      double v;
      if (!(ls >> i >> j >> v)) fail("bad J line");
      if (i >= j) fail("J requires i < j");
      triplets.push_back({i, j, v});
    } else if (tag == "h") {
      if (n < 0) fail("h before header");
      int i;
      double v;
      if (!(ls >> i >> v)) fail("bad h line");
      if (i < 0 || i >= n) fail("h index out of range");
      if (fields[i] != 0.0) fail("duplicate h entry");
      fields[i] = v;
    } else {
      fail("unrecognized tag '" + tag + "'");
    }
  }
  if (n < 0) throw ContractViolation("instance file: missing 'ising <N>' header");
  return IsingProblem(n, std::move(triplets), std::move(fields));
}

inline IsingProblem read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return read_instance(in);
}

/// Partition audit export: {"n": ..., "ambivalent": [...], "frozen": {"site": sign}}.
inline nlohmann::json partition_to_json(const Partition& part) {
  nlohmann::json frozen = nlohmann::json::object();
  for (int site = 0; site < part.n_sites(); ++site)
    if (part.frozen_sign[site] != 0)
      frozen[std::to_string(site)] = static_cast<int>(part.frozen_sign[site]);
  return nlohmann::json{
      {"n", part.n_ambivalent}, {"ambivalent", part.ambivalent_sites()}, {"frozen", frozen}};
}

inline Partition partition_from_json(const nlohmann::json& j, int n_sites) {
  Partition part;
  part.n_ambivalent = j.at("n").get<int>();
  std::vector<int> ambivalent = j.at("ambivalent").get<std::vector<int>>();
  part.frozen_sign.assign(static_cast<std::size_t>(n_sites), 0);
  part.order = ambivalent;
  std::vector<std::pair<int, int>> frozen;
  for (const auto& [key, value] : j.at("frozen").items())
    frozen.emplace_back(std::stoi(key), value.get<int>());
  std::sort(frozen.begin(), frozen.end());
  for (auto [site, sign] : frozen) {
    part.order.push_back(site);
    part.frozen_sign[site] = static_cast<std::int8_t>(sign);
  }
  if (static_cast<int>(part.order.size()) != n_sites)
    throw ContractViolation("partition json does not cover all sites");
  return part;
}

/// Trajectory CSV with columns tau, site, phi, phibar; one row per sampled
/// step and site. A path ending in .gz writes a gzip stream instead.
inline std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::string out = "tau,site,phi,phibar\n";
  for (const auto& sample : samples) {
    for (std::size_t site = 0; site < sample.phi.size(); ++site) {
      out += detail::format_g17(sample.tau);
      out += ',';
      out += std::to_string(site);
      out += ',';
      out += detail::format_g17(sample.phi[site]);
      out += ',';
      out += detail::format_g17(sample.phibar[site]);
      out += '\n';
    }
  }
  return out;
}

inline void write_trajectory_file(const std::string& path,
                                  const std::vector<TrajectorySample>& samples) {
  std::string csv = trajectory_csv(samples);
  bool gzipped = path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  if (gzipped) {
    gzFile gz = gzopen(path.c_str(), "wb");
    if (!gz) throw std::runtime_error("cannot open for writing: " + path);
    std::size_t written = 0;
    while (written < csv.size()) {
      unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(csv.size() - written, 1u << 20));
      int rc = gzwrite(gz, csv.data() + written, chunk);
      if (rc <= 0) {
        gzclose(gz);
        throw std::runtime_error("gzip write failed: " + path);
      }
      written += static_cast<std::size_t>(rc);
    }
    if (gzclose(gz) != Z_OK) throw std::runtime_error("gzip close failed: " + path);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
  }
}

/// Inflates a gzip file fully; test helper for the .gz trajectory path.
inline std::string read_gzip_file(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (!gz) throw std::runtime_error("cannot open gzip file: " + path);
  std::string out;
  char buf[1 << 16];
  int got;
  while ((got = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(got));
  bool ok = got == 0;
  gzclose(gz);
  if (!ok) throw std::runtime_error("gzip read failed: " + path);
  return out;
}

}  // namespace fluxanneal
