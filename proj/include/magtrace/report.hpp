#pragma once

#include <string>
#include <vector>

#include "magtrace/flow.hpp"
#include "magtrace/traceformula.hpp"

// Deterministic output rendering: identical inputs yield byte-identical
// files.  Floats are printed at 17 significant digits (%.17g) in a fixed
// field order; containers preserve computation order.

namespace magtrace {

// Minimal JSON composer sufficient for the report schema; values are
// inserted in call order and never re-sorted.
class JsonWriter {
  public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array(const std::string& key = "");
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long long v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(bool v);
    JsonWriter& field(const std::string& k, double v);
    JsonWriter& field(const std::string& k, int v);
    JsonWriter& field(const std::string& k, const std::string& v);
    JsonWriter& field(const std::string& k, bool v);
    JsonWriter& field_complex(const std::string& k, std::complex<double> v);
    std::string str() const { return out_; }

  private:
    void comma();
    std::string out_;
    std::vector<bool> first_;  // per-nesting "no element emitted yet"
};

struct TraceRunReport {
    double E = 0.0;
    std::string regime;
    int g = 2;
    std::string phi_kind;
    std::string surface_id;
    unsigned long long seed = 0;
    std::vector<int> Ns;
    std::vector<double> Y;
    std::vector<std::complex<double>> c0, c1;  // per N
    ResidualFit fit;                            // populated when |Ns| >= 4
    bool have_fit = false;
    CoefficientReport last_coefficients;        // breakdown for the largest N
};

std::string render_trace_json(const TraceRunReport& r);

// columns: N,Y,model,residual with model = Re(c0) N + Re(c1)
std::string render_plot_csv(const TraceRunReport& r);

// columns: t,x,y,theta at every accepted step
std::string render_trajectory_csv(const Trajectory& tr);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace magtrace
