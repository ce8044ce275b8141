#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lapcom/sampler.hpp"

namespace lapcom {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

/// Streams CSV rows skipping the header line.
template <typename RowFn>
void for_each_csv_row(const std::filesystem::path& p, RowFn&& fn) {
  std::ifstream in = open_in(p);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    std::vector<std::string> fields;
    std::string f;
    std::istringstream is(line);
    while (std::getline(is, f, ',')) fields.push_back(f);
    fn(fields);
  }
}

}  // namespace detail

/// Writes one chain's trace as a CSV bundle: config.json, logpost.csv,
/// accept.csv, and per-symbol files under states/. All indices in the files
/// are 1-based.
inline void save_trace(const Trace& trace, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "states");

  {
    nlohmann::json j;
    to_json(j, trace.config);
    detail::open_out(dir / "config.json") << j.dump(2) << '\n';
  }
  {
    auto out = detail::open_out(dir / "logpost.csv");
    out << "sample,log_posterior\n";
    for (std::size_t t = 0; t < trace.log_posterior.size(); ++t)
      out << (t + 1) << ',' << detail::fmt_double(trace.log_posterior[t]) << '\n';
  }
  {
    auto out = detail::open_out(dir / "accept.csv");
    out << "block,rate\n";
    for (const auto& [block, rate] : trace.acceptance_rates)
      out << block << ',' << detail::fmt_double(rate) << '\n';
  }

  auto alpha = detail::open_out(dir / "states" / "alpha.csv");
  auto e_out = detail::open_out(dir / "states" / "e.csv");
  auto g_out = detail::open_out(dir / "states" / "G.csv");
  auto tau = detail::open_out(dir / "states" / "tau.csv");
  auto c_out = detail::open_out(dir / "states" / "C.csv");
  auto k_out = detail::open_out(dir / "states" / "K.csv");
  auto w_out = detail::open_out(dir / "states" / "w.csv");
  auto pi = detail::open_out(dir / "states" / "pi.csv");
  auto s_out = detail::open_out(dir / "states" / "S.csv");
  auto mu = detail::open_out(dir / "states" / "mu.csv");
  auto sigma2 = detail::open_out(dir / "states" / "sigma2.csv");
  auto z_out = detail::open_out(dir / "states" / "Z.csv");

  alpha << "sample,alpha\n";
  e_out << "sample,e\n";
  g_out << "sample,G,G_plus\n";
  tau << "sample,g,tau\n";
  c_out << "sample,m,C\n";
  k_out << "sample,g,K,K_plus\n";
  w_out << "sample,g,w\n";
  pi << "sample,g,k,pi\n";
  s_out << "sample,g,i,S\n";
  mu << "sample,g,k,q,mu\n";
  sigma2 << "sample,g,k,q,sigma2\n";
  z_out << "sample,g,i,q,Z\n";

  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    const ModelState& st = trace.samples[t];
    const std::size_t s = t + 1;
    alpha << s << ',' << detail::fmt_double(st.alpha) << '\n';
    e_out << s << ',' << detail::fmt_double(st.e) << '\n';
    g_out << s << ',' << st.G << ',' << st.G_plus << '\n';
    for (int g = 0; g < st.G; ++g)
      tau << s << ',' << (g + 1) << ',' << detail::fmt_double(st.tau[g]) << '\n';
    for (std::size_t m = 0; m < st.C.size(); ++m)
      c_out << s << ',' << (m + 1) << ',' << (st.C[m] + 1) << '\n';
    for (int g = 0; g < st.G; ++g) {
      const LatentComponent& comp = st.comps[g];
      k_out << s << ',' << (g + 1) << ',' << comp.K << ',' << comp.K_plus << '\n';
      w_out << s << ',' << (g + 1) << ',' << detail::fmt_double(comp.w) << '\n';
      for (int k = 0; k < comp.K; ++k) {
        pi << s << ',' << (g + 1) << ',' << (k + 1) << ','
           << detail::fmt_double(comp.pi[k]) << '\n';
        mu << s << ',' << (g + 1) << ',' << (k + 1) << ",1,"
           << detail::fmt_double(comp.mu[k].x) << '\n';
        mu << s << ',' << (g + 1) << ',' << (k + 1) << ",2,"
           << detail::fmt_double(comp.mu[k].y) << '\n';
        sigma2 << s << ',' << (g + 1) << ',' << (k + 1) << ",1,"
               << detail::fmt_double(comp.sigma2[k]) << '\n';
        sigma2 << s << ',' << (g + 1) << ',' << (k + 1) << ",2,"
               << detail::fmt_double(comp.sigma2[k]) << '\n';
      }
      for (std::size_t i = 0; i < comp.S.size(); ++i)
        s_out << s << ',' << (g + 1) << ',' << (i + 1) << ',' << (comp.S[i] + 1) << '\n';
      for (std::size_t i = 0; i < comp.Z.size(); ++i) {
        z_out << s << ',' << (g + 1) << ',' << (i + 1) << ",1,"
              << detail::fmt_double(comp.Z[i].x) << '\n';
        z_out << s << ',' << (g + 1) << ',' << (i + 1) << ",2,"
              << detail::fmt_double(comp.Z[i].y) << '\n';
      }
    }
  }
}

inline Trace load_trace(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  Trace trace;
  {
    std::ifstream in = detail::open_in(dir / "config.json");
    nlohmann::json j = nlohmann::json::parse(in);
    from_json(j, trace.config);
  }
  detail::for_each_csv_row(dir / "logpost.csv", [&](const std::vector<std::string>& f) {
    trace.log_posterior.push_back(std::stod(f.at(1)));
  });
  detail::for_each_csv_row(dir / "accept.csv", [&](const std::vector<std::string>& f) {
    trace.acceptance_rates[f.at(0)] = std::stod(f.at(1));
  });

  const std::size_t n_samples = trace.log_posterior.size();
  trace.samples.resize(n_samples);

  detail::for_each_csv_row(dir / "states" / "G.csv", [&](const std::vector<std::string>& f) {
    ModelState& st = trace.samples.at(std::stoul(f[0]) - 1);
    st.G = std::stoi(f[1]);
    st.G_plus = std::stoi(f[2]);
    st.tau.assign(st.G, 0.0);
    st.comps.resize(st.G);
  });
  detail::for_each_csv_row(dir / "states" / "alpha.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1).alpha = std::stod(f[1]);
  });
  detail::for_each_csv_row(dir / "states" / "e.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1).e = std::stod(f[1]);
  });
  detail::for_each_csv_row(dir / "states" / "tau.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1).tau.at(std::stoul(f[1]) - 1) = std::stod(f[2]);
  });
  detail::for_each_csv_row(dir / "states" / "C.csv", [&](const std::vector<std::string>& f) {
    ModelState& st = trace.samples.at(std::stoul(f[0]) - 1);
    const std::size_t m = std::stoul(f[1]);
    if (st.C.size() < m) st.C.resize(m);
    st.C[m - 1] = std::stoi(f[2]) - 1;
  });
  detail::for_each_csv_row(dir / "states" / "K.csv", [&](const std::vector<std::string>& f) {
    LatentComponent& comp =
        trace.samples.at(std::stoul(f[0]) - 1).comps.at(std::stoul(f[1]) - 1);
    comp.K = std::stoi(f[2]);
    comp.K_plus = std::stoi(f[3]);
    comp.pi.assign(comp.K, 0.0);
    comp.mu.assign(comp.K, Vec2{});
    comp.sigma2.assign(comp.K, 0.0);
  });
  detail::for_each_csv_row(dir / "states" / "w.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1).comps.at(std::stoul(f[1]) - 1).w = std::stod(f[2]);
  });
  detail::for_each_csv_row(dir / "states" / "pi.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1)
        .comps.at(std::stoul(f[1]) - 1)
        .pi.at(std::stoul(f[2]) - 1) = std::stod(f[3]);
  });
  detail::for_each_csv_row(dir / "states" / "S.csv", [&](const std::vector<std::string>& f) {
    LatentComponent& comp =
        trace.samples.at(std::stoul(f[0]) - 1).comps.at(std::stoul(f[1]) - 1);
    const std::size_t i = std::stoul(f[2]);
    if (comp.S.size() < i) comp.S.resize(i);
    comp.S[i - 1] = std::stoi(f[3]) - 1;
  });
  detail::for_each_csv_row(dir / "states" / "mu.csv", [&](const std::vector<std::string>& f) {
    Vec2& v = trace.samples.at(std::stoul(f[0]) - 1)
                  .comps.at(std::stoul(f[1]) - 1)
                  .mu.at(std::stoul(f[2]) - 1);
    (std::stoi(f[3]) == 1 ? v.x : v.y) = std::stod(f[4]);
  });
  detail::for_each_csv_row(dir / "states" / "sigma2.csv", [&](const std::vector<std::string>& f) {
    trace.samples.at(std::stoul(f[0]) - 1)
        .comps.at(std::stoul(f[1]) - 1)
        .sigma2.at(std::stoul(f[2]) - 1) = std::stod(f[4]);
  });
  detail::for_each_csv_row(dir / "states" / "Z.csv", [&](const std::vector<std::string>& f) {
    LatentComponent& comp =
        trace.samples.at(std::stoul(f[0]) - 1).comps.at(std::stoul(f[1]) - 1);
    const std::size_t i = std::stoul(f[2]);
    if (comp.Z.size() < i) comp.Z.resize(i);
    Vec2& v = comp.Z[i - 1];
    (std::stoi(f[3]) == 1 ? v.x : v.y) = std::stod(f[4]);
  });
  return trace;
}

}  // namespace lapcom
