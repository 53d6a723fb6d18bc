// Copyright 2026 The spikediff Authors.
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

#include "spikediff/spikediff.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>

#include "spikediff/denoisers.hpp"
#include "spikediff/diffusion.hpp"
#include "spikediff/error.hpp"
#include "spikediff/experiments.hpp"
#include "spikediff/linalg.hpp"
#include "spikediff/spike_model.hpp"

struct sd_matrix {
  spikediff::Matrix m;
};

struct sd_denoiser {
  std::unique_ptr<spikediff::Denoiser> impl;
  std::string id;
};

namespace {

thread_local std::string g_last_error;

sd_status fail(sd_status code, const std::string& what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
sd_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return SD_OK;
  } catch (const spikediff::Error& e) {
    switch (e.code()) {
      case spikediff::ErrorCode::kInvalidArgument:
        return fail(SD_ERR_INVALID_ARGUMENT, e.what());
      case spikediff::ErrorCode::kConfig:
        return fail(SD_ERR_CONFIG, e.what());
      case spikediff::ErrorCode::kCapacity:
        return fail(SD_ERR_CAPACITY, e.what());
      case spikediff::ErrorCode::kNumerical:
        return fail(SD_ERR_NUMERICAL, e.what());
    }
    return fail(SD_ERR_INTERNAL, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(SD_ERR_CONFIG, std::string("config: ") + e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(SD_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SD_ERR_CAPACITY, "out of memory");
  } catch (const std::exception& e) {
    return fail(SD_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw spikediff::InvalidArgument(what);
}

sd_matrix* wrap(spikediff::Matrix m) { return new sd_matrix{std::move(m)}; }

spikediff::SymMatrix as_symmetric(const spikediff::Matrix& m) {
  return spikediff::SymMatrix::from_symmetric(m);
}

}  // namespace

extern "C" {

const char* sd_version(void) { return spikediff::version_string(); }

const char* sd_last_error(void) { return g_last_error.c_str(); }

sd_status sd_matrix_create(size_t n, const double* data, sd_matrix** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    require(n > 0, "n must be positive");
    const auto ni = static_cast<Eigen::Index>(n);
    spikediff::Matrix m = spikediff::Matrix::Zero(ni, ni);
    if (data != nullptr) {
      for (Eigen::Index i = 0; i < ni; ++i) {
        for (Eigen::Index j = 0; j < ni; ++j) m(i, j) = data[i * ni + j];
      }
    }
    *out = wrap(std::move(m));
  });
}

void sd_matrix_destroy(sd_matrix* m) { delete m; }

size_t sd_matrix_dim(const sd_matrix* m) {
  return m == nullptr ? 0 : static_cast<size_t>(m->m.rows());
}

sd_status sd_matrix_read(const sd_matrix* m, double* out, size_t len) {
  return guarded([&] {
    require(m != nullptr && out != nullptr, "NULL argument");
    const auto n = m->m.rows();
    require(len >= static_cast<size_t>(n * n), "output buffer too small");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) out[i * n + j] = m->m(i, j);
    }
  });
}

sd_status sd_matrix_norms(const sd_matrix* m, double* frobenius, double* op) {
  return guarded([&] {
    require(m != nullptr, "matrix is NULL");
    if (frobenius != nullptr) *frobenius = std::sqrt(spikediff::frobenius_squared(m->m));
    if (op != nullptr) *op = spikediff::norms(as_symmetric(m->m)).op;
  });
}

sd_status sd_sample_target(const char* kind, size_t n, size_t k, uint64_t seed,
                           uint64_t label, sd_matrix** out) {
  return guarded([&] {
    require(kind != nullptr && out != nullptr, "NULL argument");
    const spikediff::TargetDistribution dist{spikediff::parse_target_kind(kind), n, k};
    spikediff::NoiseStream s = spikediff::NoiseStream(seed).split(label);
    *out = wrap(spikediff::sample_target(dist, s).x.matrix());
  });
}

sd_status sd_observe(const sd_matrix* x, double t, uint64_t seed, uint64_t label,
                     sd_matrix** out) {
  return guarded([&] {
    require(x != nullptr && out != nullptr, "NULL argument");
    spikediff::NoiseStream s = spikediff::NoiseStream(seed).split(label);
    *out = wrap(spikediff::observe_single(as_symmetric(x->m), t, s).y);
  });
}

sd_status sd_thresholds(size_t n, size_t k, double* t_alg, double* t_bayes) {
  return guarded([&] {
    if (t_alg != nullptr) *t_alg = spikediff::t_alg(n, k);
    if (t_bayes != nullptr) *t_bayes = spikediff::t_bayes(n, k);
  });
}

sd_status sd_denoiser_create(const char* spec_json, size_t n, size_t k, uint64_t seed,
                             sd_denoiser** out) {
  return guarded([&] {
    require(spec_json != nullptr && out != nullptr, "NULL argument");
    require(n > 0 && k > 0 && k <= n, "need 1 <= k <= n");
    const auto spec = nlohmann::json::parse(spec_json);
    auto factory = spikediff::make_factory(spec, n, k);
    auto d = std::make_unique<sd_denoiser>();
    d->impl = factory.make(spikediff::NoiseStream(seed));
    d->id = factory.id;
    *out = d.release();
  });
}

void sd_denoiser_destroy(sd_denoiser* d) { delete d; }

const char* sd_denoiser_id(const sd_denoiser* d) { return d == nullptr ? "" : d->id.c_str(); }

sd_status sd_denoiser_evaluate(sd_denoiser* d, const sd_matrix* y, double t, sd_matrix** out) {
  return guarded([&] {
    require(d != nullptr && y != nullptr && out != nullptr, "NULL argument");
    *out = wrap(d->impl->evaluate(y->m, t).matrix());
  });
}

sd_status sd_euler_sample(sd_denoiser* d, double delta, double t_max, uint64_t seed,
                          sd_matrix** final_sample, sd_matrix** final_state) {
  return guarded([&] {
    require(d != nullptr, "denoiser is NULL");
    spikediff::DiffusionConfig dc;
    dc.n = d->impl->dim();
    dc.delta = delta;
    dc.t_max = t_max;
    const auto run = spikediff::euler_sample(*d->impl, dc, spikediff::NoiseStream(seed));
    if (final_sample != nullptr) *final_sample = wrap(run.final_sample.matrix());
    if (final_state != nullptr) *final_state = wrap(run.states.back());
  });
}

sd_status sd_run_experiment(const char* subcommand, const char* config_json,
                            const char* out_path, const sd_run_options* options) {
  return guarded([&] {
    require(config_json != nullptr, "config is NULL");
    const auto doc = nlohmann::json::parse(config_json);
    spikediff::RunOverrides ov;
    std::size_t threads = 1;
    if (options != nullptr) {
      if (options->override_seed) ov.seed = options->seed;
      if (options->override_enum_cap) ov.enum_cap = options->enum_cap;
      if (options->threads > 1) threads = options->threads;
    }
    if (out_path != nullptr) ov.output = out_path;
    const auto config =
        spikediff::parse_config(doc, subcommand == nullptr ? "" : subcommand, ov);
    if (config.output.empty()) {
      throw spikediff::ConfigError("config: no output path (set 'output' or pass one)");
    }
    if (config.output == "-") {
      spikediff::run_experiment(config, std::cout, threads);
      std::cout.flush();
      return;
    }
    // Write to a sibling temp file so a failed run leaves no partial output.
    const std::string tmp = config.output + ".partial";
    try {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      if (!file) throw std::ios_base::failure("cannot open " + tmp);
      spikediff::run_experiment(config, file, threads);
      file.flush();
      if (!file) throw std::ios_base::failure("write failed for " + tmp);
    } catch (...) {
      std::remove(tmp.c_str());
      throw;
    }
    if (std::rename(tmp.c_str(), config.output.c_str()) != 0) {
      std::remove(tmp.c_str());
      throw std::ios_base::failure("cannot move output into " + config.output);
    }
  });
}

}  // extern "C"
