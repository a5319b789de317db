#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "rrm/diagnostics.hpp"
#include "rrm/dh_benchmark.hpp"
#include "rrm/errors.hpp"
#include "rrm/evaluation.hpp"
#include "rrm/intraday_model.hpp"
#include "rrm/pipeline.hpp"
#include "rrm/scaling.hpp"
#include "rrm/subordinator.hpp"
#include "rrm/synthetic.hpp"

namespace py = pybind11;

namespace {

rrm::RiskSpec make_spec(double theta, int es_grid_size, const std::string& es_rule) {
  rrm::RiskSpec spec;
  spec.theta = theta;
  spec.es_grid_size = es_grid_size;
  if (es_rule == "tail") {
    spec.es_rule = rrm::EsRule::TailIntegral;
  } else if (es_rule == "grid") {
    spec.es_rule = rrm::EsRule::QuantileGrid;
  } else {
    throw std::invalid_argument("es_rule must be tail or grid");
  }
  spec.validate();
  return spec;
}

rrm::IntradayDay make_day(const std::vector<double>& log_prices, const std::vector<double>& volumes) {
  rrm::IntradayDay day;
  day.date = rrm::parse_date("2000-01-03");
  day.log_prices = log_prices;
  day.volumes = volumes.empty() ? std::vector<double>(rrm::kSessionMinutes, 1.0) : volumes;
  day.observed_minutes = static_cast<int>(log_prices.size());
  day.validate();
  return day;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Daily VaR and ES from intraday returns";
  m.attr("__version__") = rrm::library_version();

  py::register_exception<rrm::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<rrm::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<rrm::TailModel>(m, "TailModel")
      .def(py::init([](double mu, double sigma, double nu, std::optional<double> phi, int c) {
             rrm::TailModel model{mu, sigma, nu, phi, c, 0.0};
             model.validate();
             return model;
           }),
           py::arg("mu"), py::arg("sigma"), py::arg("nu"), py::arg("phi") = py::none(), py::arg("c") = 1)
      .def_readonly("mu", &rrm::TailModel::mu)
      .def_readonly("sigma", &rrm::TailModel::sigma)
      .def_readonly("nu", &rrm::TailModel::nu)
      .def_readonly("phi", &rrm::TailModel::phi)
      .def_readonly("c", &rrm::TailModel::c)
      .def_readonly("loglik", &rrm::TailModel::loglik)
      .def("__repr__", [](const rrm::TailModel& t) {
        return "TailModel(mu=" + std::to_string(t.mu) + ", sigma=" + std::to_string(t.sigma) +
               ", nu=" + std::to_string(t.nu) + (t.phi ? ", phi=" + std::to_string(*t.phi) : std::string()) +
               ", c=" + std::to_string(t.c) + ")";
      });

  py::class_<rrm::RiskPair>(m, "RiskPair")
      .def_readonly("theta", &rrm::RiskPair::theta)
      .def_readonly("var", &rrm::RiskPair::var)
      .def_readonly("es", &rrm::RiskPair::es)
      .def_property_readonly("method", [](const rrm::RiskPair& p) { return std::string(rrm::to_string(p.method)); })
      .def_property_readonly("warnings", [](const rrm::RiskPair& p) { return p.diagnostics.warnings; })
      .def("__repr__", [](const rrm::RiskPair& p) {
        return "RiskPair(theta=" + std::to_string(p.theta) + ", var=" + std::to_string(p.var) +
               ", es=" + std::to_string(p.es) + ")";
      });

  m.def("subordinate",
        [](const std::vector<double>& log_prices, const std::vector<double>& volumes, const std::string& kind,
           int c) {
          rrm::SubordinationSpec spec{rrm::parse_subordinator_kind(kind), c};
          spec.validate();
          const auto s = rrm::subordinate(make_day(log_prices, volumes), spec);
          return py::make_tuple(s.tau, s.returns, s.clock_fallback);
        },
        py::arg("log_prices"), py::arg("volumes") = std::vector<double>{}, py::arg("kind") = "clock",
        py::arg("c") = 39, "Returns (tau, returns, clock_fallback) for one day of 391 log prices.");

  m.def("fit_iid_t", [](const std::vector<double>& y, double mu) { return rrm::fit_iid_t(y, mu); },
        py::arg("returns"), py::arg("mu_fixed") = 0.0);
  m.def("fit_ma1_t", [](const std::vector<double>& y, double mu) { return rrm::fit_ma1_t(y, mu); },
        py::arg("returns"), py::arg("mu_fixed") = 0.0);
  m.def("ema_drift", [](const std::vector<double>& y, int beta, int window) { return rrm::ema_drift(y, beta, window); },
        py::arg("daily_returns"), py::arg("beta") = 21, py::arg("init_window") = 252);

  m.def("cf_cdf", [](const rrm::TailModel& model, const std::vector<double>& x) {
          rrm::DailyDistribution dist(model);
          std::vector<double> out;
          out.reserve(x.size());
          for (double v : x) out.push_back(dist.cdf(v));
          return out;
        },
        py::arg("model"), py::arg("x"));
  m.def("cf_risk_pair",
        [](const rrm::TailModel& model, double theta, int es_grid_size, const std::string& es_rule) {
          return rrm::cf_risk_pair(model, make_spec(theta, es_grid_size, es_rule));
        },
        py::arg("model"), py::arg("theta"), py::arg("es_grid_size") = 10, py::arg("es_rule") = "tail");
  m.def("mc_risk_pair",
        [](const rrm::TailModel& model, double theta, std::size_t batch_size, std::uint64_t seed) {
          rrm::McConfig config{batch_size, seed};
          config.validate();
          return rrm::mc_risk_pair(model, make_spec(theta, 10, "tail"), config);
        },
        py::arg("model"), py::arg("theta"), py::arg("batch_size") = 100000, py::arg("seed") = 0);
  m.def("dh_risk_pair",
        [](const std::vector<double>& y, double theta, double hurst) {
          rrm::DhConfig config{hurst};
          config.validate();
          return rrm::dh_risk_pair(y, make_spec(theta, 10, "tail"), config);
        },
        py::arg("returns"), py::arg("theta"), py::arg("hurst") = 0.5);

  m.def("pinball_loss", &rrm::pinball_loss, py::arg("q_hat"), py::arg("y"), py::arg("theta"));
  m.def("joint_loss", &rrm::joint_loss, py::arg("q_hat"), py::arg("e_hat"), py::arg("y"), py::arg("theta"));
  m.def("as_tests",
        [](const std::vector<double>& y, const std::vector<double>& q, const std::vector<double>& e, double theta,
           std::size_t n_boot, std::uint64_t seed) {
          rrm::RealizedPanel panel;
          panel.dates = rrm::business_days(rrm::parse_date("2000-01-03"), static_cast<int>(y.size()));
          panel.y = y;
          panel.q_hat = q;
          panel.e_hat = e;
          panel.theta = theta;
          const auto r = rrm::as_tests(panel, n_boot, seed);
          py::dict out;
          out["hits"] = r.hits;
          out["z1"] = r.z1;
          out["z2"] = r.z2;
          out["as1_p"] = r.as1_p;
          out["as2_p"] = r.as2_p;
          return out;
        },
        py::arg("y"), py::arg("q_hat"), py::arg("e_hat"), py::arg("theta"), py::arg("n_boot") = 10000,
        py::arg("seed") = 0);

  m.def("structure_function",
        [](const std::vector<std::vector<double>>& paths, bool pooled) {
          rrm::StructureFunctionOptions options;
          options.aggregation = pooled ? rrm::StructureAggregation::Pooled : rrm::StructureAggregation::PerDay;
          const auto r = rrm::structure_function_paths(paths, options);
          py::dict out;
          out["q"] = r.q_grid;
          out["H"] = r.Hq;
          out["log_A"] = r.Aq_log;
          out["r2"] = r.r2;
          return out;
        },
        py::arg("paths"), py::arg("pooled") = true);
  m.def("scaling_bias",
        [](double mu, double sigma, int c, double theta) {
          const auto b = rrm::scaling_bias(mu, sigma, c, theta);
          return py::make_tuple(b.biased, b.truth);
        },
        py::arg("mu"), py::arg("sigma"), py::arg("c"), py::arg("theta"));

  m.def("generate",
        [](const std::string& family, const std::string& dependence, int c, double phi, double nu, double daily_mean,
           double daily_sd, int n_days, std::uint64_t seed) {
          auto spec = rrm::GeneratorSpec::calibrated(rrm::parse_family(family), rrm::parse_dependence(dependence), c,
                                                     phi, nu, daily_mean, daily_sd, n_days, seed);
          spec.validate();
          return rrm::generate(spec).returns;
        },
        py::arg("family") = "gaussian", py::arg("dependence") = "ma1", py::arg("c") = 39, py::arg("phi") = -0.05,
        py::arg("nu") = 3.0, py::arg("daily_mean") = 0.0, py::arg("daily_sd") = 0.01, py::arg("n_days") = 2520,
        py::arg("seed") = 1, "Intraday returns, one list of c values per day.");

  m.def("run_estimate",
        [](const std::string& config_text) {
          const auto config = rrm::parse_config(config_text);
          config.validate();
          py::gil_scoped_release release;
          return rrm::run_estimate(config).csv_paths;
        },
        py::arg("config_text"), "Runs the estimate pipeline from key = value text; returns the CSV paths.");
}
