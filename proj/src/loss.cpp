#include "kgex/loss.hpp"

#include <algorithm>
#include <cmath>

#include "kgex/error.hpp"

namespace kgex {
namespace {

double softplus(double x) {
    return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

bool complex_kind(ModelKind kind) {
    return kind == ModelKind::ComplEx || kind == ModelKind::ComplExN3;
}

// Softmax cross entropy along one direction (all tails or all heads), scaled
// by `scale`. Returns logsumexp(scores) - score(true).
double softmax_direction(const ModelParams& params, const Triple& triple, bool tails,
                         double scale, GradientBuffer* grad) {
    std::vector<double> scores(params.entity_count);
    if (tails)
        score_all_tails(params, triple.head, triple.relation, scores);
    else
        score_all_heads(params, triple.relation, triple.tail, scores);

    double peak = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - peak);
    double lse = peak + std::log(z);
    EntityId truth = tails ? triple.tail : triple.head;
    double loss = lse - scores[truth];

    if (grad != nullptr) {
        for (std::size_t e = 0; e < params.entity_count; ++e) {
            double p = std::exp(scores[e] - peak) / z;
            double coeff = scale * (p - (e == truth ? 1.0 : 0.0));
            Triple candidate = triple;
            (tails ? candidate.tail : candidate.head) = static_cast<EntityId>(e);
            accumulate_score_gradient(params, candidate, coeff, *grad);
        }
    }
    return loss;
}

// lambda * sum over complex components of |x|^3 for one embedding row, with
// gradients 3 * lambda * x_re * |x| into each half.
double n3_row(std::span<const double> row, double lambda, std::span<double> grad_row) {
    std::size_t half = row.size() / 2;
    double total = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        double re = row[i], im = row[half + i];
        double mod = std::sqrt(re * re + im * im);
        total += mod * mod * mod;
        if (!grad_row.empty()) {
            grad_row[i] += 3.0 * lambda * re * mod;
            grad_row[half + i] += 3.0 * lambda * im * mod;
        }
    }
    return lambda * total;
}

double dropout_scale(double rate, std::mt19937_64* rng) {
    if (rng == nullptr || rate <= 0.0) return 1.0;
    double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
    return u < rate ? 0.0 : 1.0 / (1.0 - rate);
}

}  // namespace

void GradientBuffer::reset(const ModelParams& params) {
    entities.assign(params.entities.size(), 0.0);
    relations.assign(params.relations.size(), 0.0);
    core.assign(params.core.size(), 0.0);
}

std::span<double> GradientBuffer::entity(const ModelParams& params, EntityId id) {
    return {entities.data() + static_cast<std::size_t>(id) * params.entity_dim,
            params.entity_dim};
}

std::span<double> GradientBuffer::relation(const ModelParams& params, RelationId id) {
    return {relations.data() + static_cast<std::size_t>(id) * params.relation_dim,
            params.relation_dim};
}

void accumulate_score_gradient(const ModelParams& params, const Triple& t, double coeff,
                               GradientBuffer& grad) {
    if (coeff == 0.0) return;
    std::span<const double> h = params.entity(t.head);
    std::span<const double> r = params.relation(t.relation);
    std::span<const double> o = params.entity(t.tail);
    std::span<double> gh = grad.entity(params, t.head);
    std::span<double> gr = grad.relation(params, t.relation);
    std::span<double> go = grad.entity(params, t.tail);
    std::size_t dim = params.entity_dim;

    switch (params.kind) {
        case ModelKind::TransE: {
            double norm = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double d = h[i] + r[i] - o[i];
                norm += d * d;
            }
            norm = std::max(std::sqrt(norm), 1e-12);
            for (std::size_t i = 0; i < dim; ++i) {
                double d = (h[i] + r[i] - o[i]) / norm;
                gh[i] += coeff * -d;
                gr[i] += coeff * -d;
                go[i] += coeff * d;
            }
            break;
        }
        case ModelKind::DistMult:
            for (std::size_t i = 0; i < dim; ++i) {
                gh[i] += coeff * r[i] * o[i];
                gr[i] += coeff * h[i] * o[i];
                go[i] += coeff * h[i] * r[i];
            }
            break;
        case ModelKind::ComplEx:
        case ModelKind::ComplExN3: {
            std::size_t half = dim / 2;
            for (std::size_t i = 0; i < half; ++i) {
                double hr = h[i], hi = h[half + i];
                double rr = r[i], ri = r[half + i];
                double tr = o[i], ti = o[half + i];
                gh[i] += coeff * (rr * tr + ri * ti);
                gh[half + i] += coeff * (rr * ti - ri * tr);
                gr[i] += coeff * (hr * tr + hi * ti);
                gr[half + i] += coeff * (hr * ti - hi * tr);
                go[i] += coeff * (hr * rr - hi * ri);
                go[half + i] += coeff * (hi * rr + hr * ri);
            }
            break;
        }
        case ModelKind::TuckER: {
            for (std::size_t a = 0; a < params.relation_dim; ++a) {
                double gr_a = 0.0;
                for (std::size_t b = 0; b < dim; ++b) {
                    std::span<const double> w = params.core_row(a, b);
                    double wo = 0.0;
                    double gh_b = 0.0;
                    for (std::size_t c = 0; c < dim; ++c) {
                        wo += w[c] * o[c];
                        go[c] += coeff * w[c] * r[a] * h[b];
                        grad.core[(a * dim + b) * dim + c] += coeff * r[a] * h[b] * o[c];
                    }
                    gh_b = r[a] * wo;
                    gh[b] += coeff * gh_b;
                    gr_a += h[b] * wo;
                }
                gr[a] += coeff * gr_a;
            }
            break;
        }
    }
}

double margin_ranking_loss(const ModelParams& params, const Triple& positive,
                           const Triple& negative, double margin, GradientBuffer* grad) {
    double gap = margin - score(params, positive) + score(params, negative);
    if (gap <= 0.0) return 0.0;
    if (grad != nullptr) {
        accumulate_score_gradient(params, positive, -1.0, *grad);
        accumulate_score_gradient(params, negative, 1.0, *grad);
    }
    return gap;
}

double softmax_n3_loss(const ModelParams& params, const Triple& triple, double lambda,
                       GradientBuffer* grad) {
    if (!complex_kind(params.kind))
        throw TrainingError("softmax-n3 loss expects a complex model");
    double loss = 0.5 * softmax_direction(params, triple, true, 0.5, grad);
    loss += 0.5 * softmax_direction(params, triple, false, 0.5, grad);
    if (lambda > 0.0) {
        std::span<double> none;
        loss += n3_row(params.entity(triple.head), lambda,
                       grad ? grad->entity(params, triple.head) : none);
        loss += n3_row(params.relation(triple.relation), lambda,
                       grad ? grad->relation(params, triple.relation) : none);
        loss += n3_row(params.entity(triple.tail), lambda,
                       grad ? grad->entity(params, triple.tail) : none);
    }
    return loss;
}

double tucker_bce_loss(const ModelParams& params, EntityId head, RelationId relation,
                       std::span<const EntityId> true_tails, double label_smoothing,
                       const DropoutRates& dropout, std::mt19937_64* rng, GradientBuffer* grad) {
    if (params.kind != ModelKind::TuckER) throw TrainingError("1-N bce loss expects tucker");
    const std::size_t de = params.entity_dim;
    const std::size_t dr = params.relation_dim;
    const std::size_t ne = params.entity_count;
    std::span<const double> h = params.entity(head);
    std::span<const double> r = params.relation(relation);

    std::vector<double> mask0(de), x0(de);
    for (std::size_t b = 0; b < de; ++b) {
        mask0[b] = dropout_scale(dropout.input, rng);
        x0[b] = h[b] * mask0[b];
    }

    // M[b][c] = sum_a r_a W[a][b][c], then per-element dropout.
    std::vector<double> m(de * de, 0.0), mask1(de * de);
    for (std::size_t a = 0; a < dr; ++a) {
        double ra = r[a];
        if (ra == 0.0) continue;
        for (std::size_t b = 0; b < de; ++b) {
            std::span<const double> w = params.core_row(a, b);
            double* row = m.data() + b * de;
            for (std::size_t c = 0; c < de; ++c) row[c] += ra * w[c];
        }
    }
    for (std::size_t i = 0; i < de * de; ++i) {
        mask1[i] = dropout_scale(dropout.hidden1, rng);
        m[i] *= mask1[i];
    }

    std::vector<double> v(de, 0.0), mask2(de);
    for (std::size_t b = 0; b < de; ++b) {
        if (x0[b] == 0.0) continue;
        const double* row = m.data() + b * de;
        for (std::size_t c = 0; c < de; ++c) v[c] += x0[b] * row[c];
    }
    for (std::size_t c = 0; c < de; ++c) {
        mask2[c] = dropout_scale(dropout.hidden2, rng);
        v[c] *= mask2[c];
    }

    std::vector<double> labels(ne, label_smoothing / static_cast<double>(ne));
    for (EntityId t : true_tails)
        labels[t] = (1.0 - label_smoothing) + label_smoothing / static_cast<double>(ne);

    double loss = 0.0;
    std::vector<double> gv(de, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        std::span<const double> row = params.entity(static_cast<EntityId>(e));
        double s = 0.0;
        for (std::size_t c = 0; c < de; ++c) s += v[c] * row[c];
        double y = labels[e];
        loss += y * softplus(-s) + (1.0 - y) * softplus(s);
        if (grad != nullptr) {
            double ds = (sigmoid(s) - y) / static_cast<double>(ne);
            std::span<double> ge = grad->entity(params, static_cast<EntityId>(e));
            for (std::size_t c = 0; c < de; ++c) {
                ge[c] += ds * v[c];
                gv[c] += ds * row[c];
            }
        }
    }
    loss /= static_cast<double>(ne);

    if (grad != nullptr) {
        std::span<double> gh = grad->entity(params, head);
        std::span<double> gr = grad->relation(params, relation);
        for (std::size_t c = 0; c < de; ++c) gv[c] *= mask2[c];
        for (std::size_t b = 0; b < de; ++b) {
            const double* mrow = m.data() + b * de;
            double gx = 0.0;
            for (std::size_t c = 0; c < de; ++c) gx += gv[c] * mrow[c];
            gh[b] += gx * mask0[b];
        }
        // g_m[b][c] before dropout mask1 folds back into r and the core.
        for (std::size_t b = 0; b < de; ++b) {
            if (x0[b] == 0.0) continue;
            for (std::size_t c = 0; c < de; ++c) {
                double gm = x0[b] * gv[c] * mask1[b * de + c];
                if (gm == 0.0) continue;
                for (std::size_t a = 0; a < dr; ++a) {
                    gr[a] += gm * params.core[(a * de + b) * de + c];
                    grad->core[(a * de + b) * de + c] += gm * r[a];
                }
            }
        }
    }
    return loss;
}

}  // namespace kgex
