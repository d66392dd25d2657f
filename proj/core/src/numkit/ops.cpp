// Copyright 2026 The Admatch Authors.
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

#include "admatch/numkit/ops.hpp"

#include <algorithm>
#include <cmath>

#include "admatch/common/error.hpp"

namespace admatch::numkit {
namespace {

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a rank-2 operand, got " +
                         shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + " shape mismatch: " + shape_string(a.shape()) +
                         " vs " + shape_string(b.shape()));
  }
}

void add_into(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

template <typename Fn>
Var unary(Var a, Fn&& fn, Tape::Backward backward) {
  Tensor out = a.value();
  for (double& v : out.data()) v = fn(v);
  return a.tape().record(std::move(out), {a}, std::move(backward));
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank2(av, "matmul");
  require_rank2(bv, "matmul");
  Tensor out = numkit::matmul(av, bv);
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(ia);
    const Tensor& B = t.value(ib);
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    if (t.requires_grad(ia)) {
      Tensor& dA = t.grad_buffer(ia);
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g.row(i).data();
        for (std::size_t p = 0; p < k; ++p) {
          const double* bp = B.row(p).data();
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += gi[j] * bp[j];
          dA(i, p) += s;
        }
      }
    }
    if (t.requires_grad(ib)) {
      Tensor& dB = t.grad_buffer(ib);
      for (std::size_t i = 0; i < m; ++i) {
        const double* gi = g.row(i).data();
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A(i, p);
          if (av == 0.0) continue;
          double* dbp = dB.row(p).data();
          for (std::size_t j = 0; j < n; ++j) dbp[j] += av * gi[j];
        }
      }
    }
  });
}

Var add(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  add_into(out, b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor& g) {
    if (t.requires_grad(ia)) add_into(t.grad_buffer(ia), g);
    if (t.requires_grad(ib)) add_into(t.grad_buffer(ib), g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor& g) {
    if (t.requires_grad(ia)) add_into(t.grad_buffer(ia), g);
    if (t.requires_grad(ib)) {
      auto d = t.grad_buffer(ib).data();
      auto gs = g.data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] -= gs[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  auto o = out.data();
  auto bv = b.value().data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Tensor& g) {
    auto gs = g.data();
    if (t.requires_grad(ia)) {
      auto d = t.grad_buffer(ia).data();
      auto other = t.value(ib).data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * other[i];
    }
    if (t.requires_grad(ib)) {
      auto d = t.grad_buffer(ib).data();
      auto other = t.value(ia).data();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * other[i];
    }
  });
}

Var add_bias(Var a, Var bias) {
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  require_rank2(av, "add_bias");
  if (bv.size() != av.cols() || bv.rows() != 1) {
    throw DimensionError("add_bias shape mismatch: " + shape_string(av.shape()) + " + " +
                         shape_string(bv.shape()));
  }
  Tensor out = av;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv[c];
  }
  const std::size_t ia = a.id(), ib = bias.id();
  return a.tape().record(std::move(out), {a, bias}, [ia, ib](Tape& t, const Tensor& g) {
    if (t.requires_grad(ia)) add_into(t.grad_buffer(ia), g);
    if (t.requires_grad(ib)) {
      Tensor& d = t.grad_buffer(ib);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto row = g.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) d[c] += row[c];
      }
    }
  });
}

Var affine(Var a, double scale, double shift) {
  const std::size_t ia = a.id();
  return unary(a, [scale, shift](double v) { return scale * v + shift; },
               [ia, scale](Tape& t, const Tensor& g) {
                 auto d = t.grad_buffer(ia).data();
                 auto gs = g.data();
                 for (std::size_t i = 0; i < d.size(); ++i) d[i] += scale * gs[i];
               });
}

Var add_n(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("add_n of zero terms");
  Tensor out = terms[0].value();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    require_same_shape(out, terms[i].value(), "add_n");
    add_into(out, terms[i].value());
  }
  std::vector<std::size_t> ids;
  for (const Var& v : terms) ids.push_back(v.id());
  return terms[0].tape().record(std::move(out), terms, [ids](Tape& t, const Tensor& g) {
    for (std::size_t id : ids) {
      if (t.requires_grad(id)) add_into(t.grad_buffer(id), g);
    }
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = numkit::sigmoid(v);
  const std::size_t ia = a.id();
  const std::size_t io = a.tape().size();  // id the result will receive
  return a.tape().record(std::move(out), {a}, [ia, io](Tape& t, const Tensor& g) {
    auto d = t.grad_buffer(ia).data();
    auto s = t.value(io).data();
    auto gs = g.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * s[i] * (1.0 - s[i]);
  });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  const std::size_t ia = a.id();
  const std::size_t io = a.tape().size();
  return a.tape().record(std::move(out), {a}, [ia, io](Tape& t, const Tensor& g) {
    auto d = t.grad_buffer(ia).data();
    auto y = t.value(io).data();
    auto gs = g.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * (1.0 - y[i] * y[i]);
  });
}

Var relu(Var a) {
  const std::size_t ia = a.id();
  return unary(a, [](double v) { return v > 0.0 ? v : 0.0; },
               [ia](Tape& t, const Tensor& g) {
                 auto d = t.grad_buffer(ia).data();
                 auto x = t.value(ia).data();
                 auto gs = g.data();
                 for (std::size_t i = 0; i < d.size(); ++i) {
                   if (x[i] > 0.0) d[i] += gs[i];
                 }
               });
}

Var softmax_rows(Var a) {
  require_rank2(a.value(), "softmax_rows");
  Tensor out = numkit::softmax_rows(a.value());
  const std::size_t ia = a.id();
  const std::size_t io = a.tape().size();
  return a.tape().record(std::move(out), {a}, [ia, io](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(ia);
    const Tensor& s = t.value(io);
    for (std::size_t r = 0; r < s.rows(); ++r) {
      auto sr = s.row(r);
      auto gr = g.row(r);
      double inner = 0.0;
      for (std::size_t c = 0; c < sr.size(); ++c) inner += gr[c] * sr[c];
      auto dr = d.row(r);
      for (std::size_t c = 0; c < sr.size(); ++c) dr[c] += sr[c] * (gr[c] - inner);
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_cols of zero parts");
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    require_rank2(p.value(), "concat_cols");
    if (p.value().rows() != rows) {
      throw DimensionError("concat_cols row mismatch: " + shape_string(parts[0].value().shape()) +
                           " vs " + shape_string(p.value().shape()));
    }
    ids.push_back(p.id());
    widths.push_back(p.value().cols());
    cols += p.value().cols();
  }
  Tensor out = Tensor::matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t offset = 0;
    for (const Var& p : parts) {
      auto src = p.value().row(r);
      std::copy(src.begin(), src.end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
      offset += src.size();
    }
  }
  return parts[0].tape().record(std::move(out), parts, [ids, widths](Tape& t, const Tensor& g) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) {
        Tensor& d = t.grad_buffer(ids[k]);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          auto gr = g.row(r).subspan(offset, widths[k]);
          auto dr = d.row(r);
          for (std::size_t c = 0; c < widths[k]; ++c) dr[c] += gr[c];
        }
      }
      offset += widths[k];
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  require_rank2(av, "slice_cols");
  if (begin >= end || end > av.cols()) {
    throw DimensionError("slice_cols [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(av.shape()));
  }
  Tensor out = Tensor::matrix(av.rows(), end - begin);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto src = av.row(r).subspan(begin, end - begin);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, begin](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      auto gr = g.row(r);
      auto dr = d.row(r);
      for (std::size_t c = 0; c < gr.size(); ++c) dr[begin + c] += gr[c];
    }
  });
}

Var scale_rows(Var a, Var w) {
  const Tensor& av = a.value();
  const Tensor& wv = w.value();
  require_rank2(av, "scale_rows");
  if (wv.rank() != 2 || wv.rows() != av.rows() || wv.cols() != 1) {
    throw DimensionError("scale_rows shape mismatch: " + shape_string(av.shape()) + " by " +
                         shape_string(wv.shape()));
  }
  Tensor out = av;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (double& v : out.row(r)) v *= wv(r, 0);
  }
  const std::size_t ia = a.id(), iw = w.id();
  return a.tape().record(std::move(out), {a, w}, [ia, iw](Tape& t, const Tensor& g) {
    const Tensor& A = t.value(ia);
    const Tensor& W = t.value(iw);
    if (t.requires_grad(ia)) {
      Tensor& d = t.grad_buffer(ia);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto gr = g.row(r);
        auto dr = d.row(r);
        for (std::size_t c = 0; c < gr.size(); ++c) dr[c] += gr[c] * W(r, 0);
      }
    }
    if (t.requires_grad(iw)) {
      Tensor& d = t.grad_buffer(iw);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto gr = g.row(r);
        auto ar = A.row(r);
        double s = 0.0;
        for (std::size_t c = 0; c < gr.size(); ++c) s += gr[c] * ar[c];
        d(r, 0) += s;
      }
    }
  });
}

Var sum_all(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor::matrix(1, 1, s), {a}, [ia](Tape& t, const Tensor& g) {
    for (double& d : t.grad_buffer(ia).data()) d += g[0];
  });
}

Var gather_sum(Var table, const std::vector<std::vector<std::int32_t>>& ids) {
  const Tensor& tv = table.value();
  require_rank2(tv, "gather_sum");
  const std::size_t vocab = tv.rows(), dim = tv.cols();
  Tensor out = Tensor::matrix(ids.size(), dim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    auto dst = out.row(r);
    for (std::int32_t id : ids[r]) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
        throw VocabularyError("embedding id " + std::to_string(id) + " outside table of " +
                              std::to_string(vocab) + " rows");
      }
      auto src = tv.row(static_cast<std::size_t>(id));
      for (std::size_t c = 0; c < dim; ++c) dst[c] += src[c];
    }
  }
  const std::size_t it = table.id();
  return table.tape().record(std::move(out), {table}, [it, ids](Tape& t, const Tensor& g) {
    Tensor& d = t.grad_buffer(it);
    for (std::size_t r = 0; r < ids.size(); ++r) {
      auto gr = g.row(r);
      for (std::int32_t id : ids[r]) {
        auto dr = d.row(static_cast<std::size_t>(id));
        for (std::size_t c = 0; c < gr.size(); ++c) dr[c] += gr[c];
      }
    }
  });
}

Var cosine_rows(Var u, Var v) {
  const Tensor& uv = u.value();
  const Tensor& vv = v.value();
  require_rank2(uv, "cosine_rows");
  require_same_shape(uv, vv, "cosine_rows");
  const std::size_t m = uv.rows();
  Tensor out = Tensor::matrix(m, 1);
  std::vector<double> nu(m), nv(m);
  for (std::size_t r = 0; r < m; ++r) {
    nu[r] = l2_norm(uv.row(r));
    nv[r] = l2_norm(vv.row(r));
    if (nu[r] == 0.0 || nv[r] == 0.0) {
      throw DegenerateVectorError("cosine of a zero-norm vector in row " + std::to_string(r));
    }
    out(r, 0) = dot(uv.row(r), vv.row(r)) / (nu[r] * nv[r]);
  }
  const std::size_t iu = u.id(), iv = v.id();
  const std::size_t io = u.tape().size();
  return u.tape().record(
      std::move(out), {u, v}, [iu, iv, io, nu, nv](Tape& t, const Tensor& g) {
        const Tensor& U = t.value(iu);
        const Tensor& V = t.value(iv);
        const Tensor& C = t.value(io);
        for (std::size_t r = 0; r < U.rows(); ++r) {
          const double c = C(r, 0), gr = g(r, 0);
          const double inv = 1.0 / (nu[r] * nv[r]);
          auto ur = U.row(r);
          auto vr = V.row(r);
          if (t.requires_grad(iu)) {
            auto d = t.grad_buffer(iu).row(r);
            const double k = c / (nu[r] * nu[r]);
            for (std::size_t j = 0; j < ur.size(); ++j) d[j] += gr * (vr[j] * inv - k * ur[j]);
          }
          if (t.requires_grad(iv)) {
            auto d = t.grad_buffer(iv).row(r);
            const double k = c / (nv[r] * nv[r]);
            for (std::size_t j = 0; j < vr.size(); ++j) d[j] += gr * (ur[j] * inv - k * vr[j]);
          }
        }
      });
}

Var bce_mean(Var p, std::span<const double> labels) {
  const Tensor& pv = p.value();
  if (pv.size() != labels.size() || labels.empty()) {
    throw DimensionError("bce_mean: " + std::to_string(pv.size()) + " predictions vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(labels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double q = std::clamp(pv[i], kProbClip, 1.0 - kProbClip);
    total -= labels[i] * std::log(q) + (1.0 - labels[i]) * std::log(1.0 - q);
  }
  const std::size_t ip = p.id();
  std::vector<double> y(labels.begin(), labels.end());
  return p.tape().record(Tensor::matrix(1, 1, total / n), {p},
                         [ip, y = std::move(y), n](Tape& t, const Tensor& g) {
                           auto d = t.grad_buffer(ip).data();
                           auto P = t.value(ip).data();
                           for (std::size_t i = 0; i < y.size(); ++i) {
                             const double q = P[i];
                             if (q <= kProbClip || q >= 1.0 - kProbClip) continue;
                             d[i] += g[0] * (-y[i] / q + (1.0 - y[i]) / (1.0 - q)) / n;
                           }
                         });
}

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

}  // namespace

Var bce_logits_mean(Var z, std::span<const double> labels) {
  const Tensor& zv = z.value();
  if (zv.size() != labels.size() || labels.empty()) {
    throw DimensionError("bce_logits_mean: " + std::to_string(zv.size()) + " logits vs " +
                         std::to_string(labels.size()) + " labels");
  }
  const double n = static_cast<double>(labels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double c = std::clamp(zv[i], -kLogitClip, kLogitClip);
    total += labels[i] * softplus(-c) + (1.0 - labels[i]) * softplus(c);
  }
  const std::size_t iz = z.id();
  std::vector<double> y(labels.begin(), labels.end());
  return z.tape().record(Tensor::matrix(1, 1, total / n), {z},
                         [iz, y = std::move(y), n](Tape& t, const Tensor& g) {
                           auto d = t.grad_buffer(iz).data();
                           auto Z = t.value(iz).data();
                           for (std::size_t i = 0; i < y.size(); ++i) {
                             if (Z[i] <= -kLogitClip || Z[i] >= kLogitClip) continue;
                             d[i] += g[0] * (sigmoid(Z[i]) - y[i]) / n;
                           }
                         });
}

}  // namespace admatch::numkit
