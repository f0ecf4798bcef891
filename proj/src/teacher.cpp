#include "mlsn/teacher.hpp"

#include <algorithm>

namespace mlsn {

double effective_alpha(long step, double alpha_max) {
    return std::min(1.0 - 1.0 / static_cast<double>(step + 1), alpha_max);
}

TeacherState make_teacher(const ModelState& student, double alpha_max, double noise_sigma) {
    TeacherState t;
    t.params = student;
    t.alpha_max = alpha_max;
    t.noise_sigma = noise_sigma;
    t.step = 0;
    return t;
}

namespace {
void ema_params(ParamSet& teacher, const ParamSet& student, double alpha) {
    for (auto& [name, t] : teacher.entries) {
        const Tensor& s = student.entries.at(name);
        if (!t.same_shape(s)) throw ShapeError("ema_update: shape mismatch for " + name);
        for (std::size_t i = 0; i < t.values.size(); ++i)
            t.values[i] = alpha * t.values[i] + (1.0 - alpha) * s.values[i];
    }
}
}  // namespace

void ema_update(TeacherState& teacher, const ModelState& student) {
    double alpha = effective_alpha(teacher.step, teacher.alpha_max);
    ema_params(teacher.params.h_params, student.h_params, alpha);
    ema_params(teacher.params.c_params, student.c_params, alpha);
    ema_params(teacher.params.s_params, student.s_params, alpha);
    teacher.step += 1;
}

Tensor perturb(const Tensor& x_batch, double sigma, RngStream& rng) {
    if (sigma < 0.0) throw StateError("perturb: sigma must be non-negative");
    if (sigma == 0.0) return x_batch;
    Tensor out = x_batch;
    for (double& v : out.values) v += rng.normal(0.0, sigma);
    return out;
}

Tensor teacher_predict(const TeacherState& teacher, const Tensor& x_batch, RngStream& rng) {
    Tensor x = perturb(x_batch, teacher.noise_sigma, rng);
    return classify(teacher.params, extract_features(teacher.params, x));
}

}  // namespace mlsn
