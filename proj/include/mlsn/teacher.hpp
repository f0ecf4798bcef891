#pragma once

#include "mlsn/networks.hpp"
#include "mlsn/rng.hpp"

namespace mlsn {

// Exponential-moving-average copy of the student. Updated once per
// optimizer step; supplies the consistency targets.
struct TeacherState {
    ModelState params;
    double alpha_max = 0.99;
    long step = 0;
    double noise_sigma = 0.1;
};

// min(1 - 1/(step+1), alpha_max): the first update copies the student.
double effective_alpha(long step, double alpha_max);

TeacherState make_teacher(const ModelState& student, double alpha_max, double noise_sigma);

void ema_update(TeacherState& teacher, const ModelState& student);

// x + iid Gaussian noise(0, sigma^2); sigma = 0 returns the input unchanged.
Tensor perturb(const Tensor& x_batch, double sigma, RngStream& rng);

// classify(extract_features(perturb(x))) with the teacher's parameters.
Tensor teacher_predict(const TeacherState& teacher, const Tensor& x_batch, RngStream& rng);

}  // namespace mlsn
