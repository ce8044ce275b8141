#pragma once

#include <json.hpp>

#include "lapcom/model.hpp"

namespace lapcom {

inline void to_json(nlohmann::json& j, const Vec2& v) { j = nlohmann::json{v.x, v.y}; }
inline void from_json(const nlohmann::json& j, Vec2& v) {
  v.x = j.at(0).get<double>();
  v.y = j.at(1).get<double>();
}

inline void to_json(nlohmann::json& j, const BnbParams& p) {
  j = nlohmann::json{{"a", p.a}, {"b", p.b}, {"c", p.c}};
}
inline void from_json(const nlohmann::json& j, BnbParams& p) {
  j.at("a").get_to(p.a);
  j.at("b").get_to(p.b);
  j.at("c").get_to(p.c);
}

inline void to_json(nlohmann::json& j, const Hyperparams& h) {
  j = nlohmann::json{{"m_alpha", h.m_alpha},
                     {"s_alpha", h.s_alpha},
                     {"mu0", h.mu0},
                     {"sigma_mu", h.sigma_mu},
                     {"u_sigma2", h.u_sigma2},
                     {"v_sigma2", h.v_sigma2},
                     {"bnb_G", h.bnb_G},
                     {"bnb_K", h.bnb_K},
                     {"l_G", h.l_G},
                     {"r_G", h.r_G},
                     {"l_K", h.l_K},
                     {"r_K", h.r_K},
                     {"G0", h.G0},
                     {"K0", h.K0},
                     {"G_max", h.G_max},
                     {"K_max", h.K_max},
                     {"n_min", h.n_min},
                     {"delta_Z", h.delta_Z},
                     {"delta_alpha", h.delta_alpha},
                     {"s_e", h.s_e},
                     {"s_w", h.s_w}};
}
inline void from_json(const nlohmann::json& j, Hyperparams& h) {
  j.at("m_alpha").get_to(h.m_alpha);
  j.at("s_alpha").get_to(h.s_alpha);
  j.at("mu0").get_to(h.mu0);
  j.at("sigma_mu").get_to(h.sigma_mu);
  j.at("u_sigma2").get_to(h.u_sigma2);
  j.at("v_sigma2").get_to(h.v_sigma2);
  j.at("bnb_G").get_to(h.bnb_G);
  j.at("bnb_K").get_to(h.bnb_K);
  j.at("l_G").get_to(h.l_G);
  j.at("r_G").get_to(h.r_G);
  j.at("l_K").get_to(h.l_K);
  j.at("r_K").get_to(h.r_K);
  j.at("G0").get_to(h.G0);
  j.at("K0").get_to(h.K0);
  j.at("G_max").get_to(h.G_max);
  j.at("K_max").get_to(h.K_max);
  j.at("n_min").get_to(h.n_min);
  j.at("delta_Z").get_to(h.delta_Z);
  j.at("delta_alpha").get_to(h.delta_alpha);
  j.at("s_e").get_to(h.s_e);
  j.at("s_w").get_to(h.s_w);
}

inline void to_json(nlohmann::json& j, const LatentComponent& c) {
  j = nlohmann::json{{"K", c.K},     {"K_plus", c.K_plus}, {"w", c.w},
                     {"pi", c.pi},   {"S", c.S},           {"mu", c.mu},
                     {"sigma2", c.sigma2}, {"Z", c.Z}};
}
inline void from_json(const nlohmann::json& j, LatentComponent& c) {
  j.at("K").get_to(c.K);
  j.at("K_plus").get_to(c.K_plus);
  j.at("w").get_to(c.w);
  j.at("pi").get_to(c.pi);
  j.at("S").get_to(c.S);
  j.at("mu").get_to(c.mu);
  j.at("sigma2").get_to(c.sigma2);
  j.at("Z").get_to(c.Z);
}

inline void to_json(nlohmann::json& j, const ModelState& s) {
  j = nlohmann::json{{"G", s.G},   {"G_plus", s.G_plus}, {"tau", s.tau},
                     {"e", s.e},   {"C", s.C},           {"alpha", s.alpha},
                     {"comps", s.comps}};
}
inline void from_json(const nlohmann::json& j, ModelState& s) {
  j.at("G").get_to(s.G);
  j.at("G_plus").get_to(s.G_plus);
  j.at("tau").get_to(s.tau);
  j.at("e").get_to(s.e);
  j.at("C").get_to(s.C);
  j.at("alpha").get_to(s.alpha);
  j.at("comps").get_to(s.comps);
}

}  // namespace lapcom
