#include "mlsn/checkpoint.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace mlsn {

namespace {

void write_widths(std::ostream& out, const std::vector<std::size_t>& w) {
    out << w.size();
    for (std::size_t v : w) out << " " << v;
}

std::vector<std::size_t> read_widths(std::istream& in) {
    std::size_t n;
    if (!(in >> n)) throw ConfigError("checkpoint: malformed spec line");
    std::vector<std::size_t> w(n);
    for (auto& v : w)
        if (!(in >> v)) throw ConfigError("checkpoint: malformed spec line");
    return w;
}

void write_params(std::ostream& out, const std::string& prefix, const ParamSet& ps) {
    out << std::setprecision(17);
    for (const auto& [name, t] : ps.entries) {
        out << "tensor " << prefix << name << " " << t.shape.size();
        for (std::size_t d : t.shape) out << " " << d;
        out << "\n";
        for (std::size_t i = 0; i < t.values.size(); ++i)
            out << (i ? " " : "") << t.values[i];
        out << "\n";
    }
}

void read_params(std::istream& in, ModelState& m, const std::string& model_prefix) {
    // consumes `tensor` records as long as they match the prefix
    std::streampos pos;
    std::string tok;
    while (true) {
        pos = in.tellg();
        if (!(in >> tok) || tok != "tensor") {
            in.clear();
            in.seekg(pos);
            return;
        }
        std::string name;
        std::size_t ndims;
        in >> name >> ndims;
        std::vector<std::size_t> shape(ndims);
        for (auto& d : shape) in >> d;
        if (name.rfind(model_prefix, 0) != 0) {
            in.clear();
            in.seekg(pos);
            return;
        }
        std::string rest = name.substr(model_prefix.size());
        ParamSet* ps = nullptr;
        if (rest.rfind("h.", 0) == 0) ps = &m.h_params;
        else if (rest.rfind("c.", 0) == 0) ps = &m.c_params;
        else if (rest.rfind("s.", 0) == 0) ps = &m.s_params;
        else throw ConfigError("checkpoint: unknown tensor name " + name);
        Tensor t = Tensor::zeros(shape);
        for (auto& v : t.values)
            if (!(in >> v)) throw ConfigError("checkpoint: truncated tensor " + name);
        ps->add(rest.substr(2), std::move(t));
    }
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelState& student,
                     const TeacherState* teacher) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint: " + path);
    out << "mlsn-checkpoint 1\n";
    out << "hspec " << student.h_spec.input_dim << " " << student.h_spec.feature_dim << " ";
    write_widths(out, student.h_spec.hidden_widths);
    out << "\ncspec " << student.c_spec.feature_dim << " " << student.c_spec.num_classes << " ";
    write_widths(out, student.c_spec.hidden_widths);
    out << "\nsspec " << student.s_spec.feature_dim << " ";
    write_widths(out, student.s_spec.hidden_widths);
    out << "\n";
    write_params(out, "student.h.", student.h_params);
    write_params(out, "student.c.", student.c_params);
    write_params(out, "student.s.", student.s_params);
    if (teacher) {
        out << std::setprecision(17);
        out << "teacher " << teacher->alpha_max << " " << teacher->step << " "
            << teacher->noise_sigma << "\n";
        write_params(out, "teacher.h.", teacher->params.h_params);
        write_params(out, "teacher.c.", teacher->params.c_params);
        write_params(out, "teacher.s.", teacher->params.s_params);
    }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    std::string magic;
    int version;
    in >> magic >> version;
    if (magic != "mlsn-checkpoint" || version != 1)
        throw ConfigError("not a recognized checkpoint file: " + path);

    LoadedCheckpoint cp;
    std::string tok;
    in >> tok;
    if (tok != "hspec") throw ConfigError("checkpoint: expected hspec");
    in >> cp.student.h_spec.input_dim >> cp.student.h_spec.feature_dim;
    cp.student.h_spec.hidden_widths = read_widths(in);
    in >> tok;
    if (tok != "cspec") throw ConfigError("checkpoint: expected cspec");
    in >> cp.student.c_spec.feature_dim >> cp.student.c_spec.num_classes;
    cp.student.c_spec.hidden_widths = read_widths(in);
    in >> tok;
    if (tok != "sspec") throw ConfigError("checkpoint: expected sspec");
    in >> cp.student.s_spec.feature_dim;
    cp.student.s_spec.hidden_widths = read_widths(in);

    read_params(in, cp.student, "student.");

    if (in >> tok) {
        if (tok != "teacher") throw ConfigError("checkpoint: unexpected token " + tok);
        TeacherState t;
        t.params.h_spec = cp.student.h_spec;
        t.params.c_spec = cp.student.c_spec;
        t.params.s_spec = cp.student.s_spec;
        in >> t.alpha_max >> t.step >> t.noise_sigma;
        read_params(in, t.params, "teacher.");
        cp.teacher = std::move(t);
    }
    return cp;
}

}  // namespace mlsn
