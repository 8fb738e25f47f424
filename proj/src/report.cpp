#include "magtrace/report.hpp"

#include <fstream>
#include <stdexcept>

#include "magtrace/util.hpp"

namespace magtrace {

void JsonWriter::comma() {
    if (!first_.empty()) {
        if (!first_.back()) out_ += ',';
        first_.back() = false;
    }
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += '{';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array(const std::string& k) {
    if (!k.empty()) key(k);
    comma();
    out_ += '[';
    first_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    first_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& k) {
    comma();
    out_ += '"' + k + "\":";
    if (!first_.empty()) first_.back() = true;  // suppress comma before the value
    return *this;
}

JsonWriter& JsonWriter::value(double v) {
    comma();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(int v) {
    comma();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    comma();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& v) {
    comma();
    out_ += '"';
    for (char c : v) {
        if (c == '"' || c == '\\') out_ += '\\';
        if (c == '\n') {
            out_ += "\\n";
            continue;
        }
        out_ += c;
    }
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(bool v) {
    comma();
    out_ += v ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::field(const std::string& k, double v) { return key(k).value(v); }
JsonWriter& JsonWriter::field(const std::string& k, int v) { return key(k).value(v); }
JsonWriter& JsonWriter::field(const std::string& k, const std::string& v) {
    return key(k).value(v);
}
JsonWriter& JsonWriter::field(const std::string& k, bool v) { return key(k).value(v); }

JsonWriter& JsonWriter::field_complex(const std::string& k, std::complex<double> v) {
    key(k).begin_object();
    field("re", v.real());
    field("im", v.imag());
    return end_object();
}

std::string render_trace_json(const TraceRunReport& r) {
    JsonWriter w;
    w.begin_object();
    w.field("E", r.E);
    w.field("regime", r.regime);
    w.field("genus", r.g);
    w.field("phi", r.phi_kind);
    w.field("surface", r.surface_id);
    w.key("seed").value(static_cast<long long>(r.seed));
    const bool have_Y = r.Y.size() == r.Ns.size();
    w.begin_array("points");
    for (std::size_t i = 0; i < r.Ns.size(); ++i) {
        w.begin_object();
        w.field("N", r.Ns[i]);
        if (have_Y) w.field("Y", r.Y[i]);
        w.field_complex("c0", r.c0[i]);
        w.field_complex("c1", r.c1[i]);
        if (have_Y) {
            const double model = r.c0[i].real() * r.Ns[i] + r.c1[i].real();
            w.field("model", model);
            w.field("residual", r.Y[i] - model);
        }
        w.end_object();
    }
    w.end_array();
    if (r.have_fit) {
        w.key("residual_fit").begin_object();
        w.field("r0_exact", r.fit.exact0);
        w.field("r1_exact", r.fit.exact1);
        if (!r.fit.exact0) {
            w.field("r0_slope", r.fit.fit0.slope);
            w.field("r0_slope_stderr", r.fit.fit0.slope_stderr);
        }
        if (!r.fit.exact1) {
            w.field("r1_slope", r.fit.fit1.slope);
            w.field("r1_slope_stderr", r.fit.fit1.slope_stderr);
        }
        w.end_object();
    }
    const auto& cr = r.last_coefficients;
    if (!cr.orbit_breakdown.empty()) {
        w.begin_array("orbit_breakdown");
        for (const auto& [o, v] : cr.orbit_breakdown) {
            w.begin_object();
            w.field("word", o.class_ref.word_str);
            w.field("length", o.class_ref.length);
            w.field("k", o.k);
            w.field("T_primitive", o.T_primitive);
            w.field("det_factor", o.det_factor);
            w.field("action", o.action);
            w.field("holonomy", o.holonomy);
            w.field_complex("value", v);
            w.end_object();
        }
        w.end_array();
    }
    if (!cr.k_breakdown.empty()) {
        w.begin_array("k_breakdown");
        for (const auto& [k, v] : cr.k_breakdown) {
            w.begin_object();
            w.field("k", k);
            w.field_complex("value", v);
            w.end_object();
        }
        w.end_array();
    }
    w.end_object();
    return w.str() + "\n";
}

std::string render_plot_csv(const TraceRunReport& r) {
    std::string s = "N,Y,model,residual\n";
    for (std::size_t i = 0; i < r.Ns.size(); ++i) {
        const double model = r.c0[i].real() * r.Ns[i] + r.c1[i].real();
        s += std::to_string(r.Ns[i]) + "," + format_double(r.Y[i]) + "," +
             format_double(model) + "," + format_double(r.Y[i] - model) + "\n";
    }
    return s;
}

std::string render_trajectory_csv(const Trajectory& tr) {
    std::string s = "t,x,y,theta\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        s += format_double(tr.t[i]) + "," + format_double(tr.states[i].x) + "," +
             format_double(tr.states[i].y) + "," + format_double(tr.states[i].theta) +
             "\n";
    return s;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace magtrace
