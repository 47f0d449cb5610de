// SPDX-License-Identifier: Apache-2.0

#include "qdyn/qdyn.h"

#include "qdyn/hilbert.hpp"
#include "qdyn/lindblad.hpp"
#include "qdyn/models.hpp"
#include "qdyn/scenarios.hpp"

#include "json.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct qdyn_space {
  qdyn::HilbertSpace space;
};

struct qdyn_operator {
  qdyn::Operator op;
};

struct qdyn_generator {
  qdyn::LindbladGenerator gen;
};

namespace {

thread_local std::string g_last_error;

qdyn_status fail(qdyn_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

qdyn_status classify(const qdyn::Error& e) {
  if (std::strncmp(e.what(), "invalid argument", 16) == 0)
    return fail(QDYN_ERR_INVALID_ARGUMENT, e.what());
  return fail(QDYN_ERR_DOMAIN, e.what());
}

template <typename Fn>
qdyn_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return QDYN_OK;
  } catch (const qdyn::Error& e) {
    return classify(e);
  } catch (const std::bad_alloc&) {
    return fail(QDYN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QDYN_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* qdyn_version(void) { return "0.1.0"; }

const char* qdyn_last_error(void) { return g_last_error.c_str(); }

void qdyn_string_destroy(char* s) { std::free(s); }

qdyn_status qdyn_space_fock(int dim, qdyn_space** out) {
  if (!out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new qdyn_space{qdyn::HilbertSpace::fock(dim)}; });
}

qdyn_status qdyn_space_qubit(qdyn_space** out) {
  if (!out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new qdyn_space{qdyn::HilbertSpace::qubit()}; });
}

qdyn_status qdyn_space_grid1d(int n_points, double dx, qdyn_space** out) {
  if (!out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = new qdyn_space{qdyn::HilbertSpace::grid1d(n_points, dx)}; });
}

void qdyn_space_destroy(qdyn_space* s) { delete s; }

qdyn_status qdyn_space_dim(const qdyn_space* s, int* out) {
  if (!s || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  *out = s->space.dim();
  g_last_error.clear();
  return QDYN_OK;
}

qdyn_status qdyn_operator_create(const qdyn_space* s, const double* data,
                                 qdyn_operator** out) {
  if (!s || !data || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    int d = s->space.dim();
    qdyn::Matrix m(d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        size_t k = 2 * (size_t(i) + size_t(d) * j);
        m(i, j) = qdyn::Complex(data[k], data[k + 1]);
      }
    *out = new qdyn_operator{qdyn::Operator{s->space, m}};
  });
}

void qdyn_operator_destroy(qdyn_operator* op) { delete op; }

qdyn_status qdyn_operator_data(const qdyn_operator* op, double* data,
                               size_t capacity) {
  if (!op || !data) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  size_t d = size_t(op->op.space.dim());
  if (capacity < 2 * d * d)
    return fail(QDYN_ERR_INVALID_ARGUMENT, "buffer too small");
  for (size_t j = 0; j < d; ++j)
    for (size_t i = 0; i < d; ++i) {
      qdyn::Complex v = op->op.matrix(Eigen::Index(i), Eigen::Index(j));
      data[2 * (i + d * j)] = v.real();
      data[2 * (i + d * j) + 1] = v.imag();
    }
  g_last_error.clear();
  return QDYN_OK;
}

qdyn_status qdyn_generator_dho(const qdyn_space* fock, double omega, double eta,
                               double beta, int zero_temperature,
                               qdyn_generator** out) {
  if (!fock || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qdyn::DHOParams p;
    p.dim = fock->space.dim();
    p.omega = omega;
    p.eta = eta;
    p.beta = beta;
    p.zero_temperature = zero_temperature != 0;
    *out = new qdyn_generator{qdyn::dho_generator(p)};
  });
}

qdyn_status qdyn_generator_two_level(const qdyn_space* qubit, double omega,
                                     double eta, double beta, int zero_temperature,
                                     qdyn_generator** out) {
  if (!qubit || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (qubit->space.dim() != 2) throw qdyn::Error("space mismatch");
    qdyn::TwoLevelParams p;
    p.omega = omega;
    p.eta = eta;
    p.beta = beta;
    p.zero_temperature = zero_temperature != 0;
    *out = new qdyn_generator{qdyn::two_level_generator(p)};
  });
}

void qdyn_generator_destroy(qdyn_generator* g) { delete g; }

qdyn_status qdyn_evolve(const qdyn_generator* g, const qdyn_operator* rho0, double t,
                        int use_expm, double rel_tol, qdyn_operator** out) {
  if (!g || !rho0 || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qdyn::DensityMatrix rho = qdyn::make_density(rho0->op);
    qdyn::DensityMatrix rt = use_expm ? qdyn::evolve_expm(g->gen, rho, t)
                                      : qdyn::evolve_ode(g->gen, rho, t, rel_tol);
    *out = new qdyn_operator{rt.op};
  });
}

qdyn_status qdyn_apply_generator(const qdyn_generator* g, const qdyn_operator* rho,
                                 qdyn_operator** out) {
  if (!g || !rho || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new qdyn_operator{qdyn::apply_generator(g->gen, rho->op)}; });
}

qdyn_status qdyn_trace_distance(const qdyn_operator* a, const qdyn_operator* b,
                                double* out) {
  if (!a || !b || !out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qdyn::require_same_space(a->op.space, b->op.space);
    *out = 0.5 * qdyn::trace_norm(a->op.matrix - b->op.matrix);
  });
}

qdyn_status qdyn_thermal_occupation(double omega, double beta, double hbar,
                                    double* out) {
  if (!out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *out = qdyn::thermal_occupation(omega, beta, hbar); });
}

qdyn_status qdyn_cat_coherence(double alpha_re, double alpha_im, double beta_re,
                               double beta_im, double eta, double t, double* out) {
  if (!out) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = qdyn::dho_cat_coherence(qdyn::Complex(alpha_re, alpha_im),
                                   qdyn::Complex(beta_re, beta_im), eta, t);
  });
}

qdyn_status qdyn_list_scenarios(char** catalog_json) {
  if (!catalog_json) return fail(QDYN_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] { *catalog_json = dup_string(qdyn::scenario_catalog_json()); });
}

qdyn_status qdyn_validate_config(const char* config_json, char** diagnostics_json,
                                 int* valid) {
  if (!config_json || !diagnostics_json || !valid)
    return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::string> diags = qdyn::validate_config_text(config_json);
    nlohmann::json rows = nlohmann::json::array();
    for (const std::string& d : diags) rows.push_back(d);
    *diagnostics_json = dup_string(rows.dump(2) + "\n");
    *valid = diags.empty() ? 1 : 0;
  });
}

qdyn_status qdyn_run_scenario(const char* config_json, const char* out_dir,
                              int workers, char** report_json, int* all_pass) {
  if (!config_json || !report_json || !all_pass)
    return fail(QDYN_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    qdyn::ScenarioResult result = qdyn::run_scenario_text(
        config_json, out_dir ? std::string(out_dir) : std::string(), workers);
    *report_json = dup_string(qdyn::run_report_json(result, config_json));
    *all_pass = result.all_pass() ? 1 : 0;
  });
}

}  // extern "C"
