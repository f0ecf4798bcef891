#pragma once

#include <optional>
#include <string>

#include "mlsn/networks.hpp"
#include "mlsn/teacher.hpp"

namespace mlsn {

// Plain-text container of named parameter tensors (17 significant digits,
// so the round trip is bit-exact). Teacher parameters ride along when present.
void save_checkpoint(const std::string& path, const ModelState& student,
                     const TeacherState* teacher = nullptr);

struct LoadedCheckpoint {
    ModelState student;
    std::optional<TeacherState> teacher;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace mlsn
