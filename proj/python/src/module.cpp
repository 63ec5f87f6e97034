#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "trf/cli.hpp"
#include "trf/detector.hpp"
#include "trf/graph.hpp"
#include "trf/inference.hpp"
#include "trf/simulator.hpp"
#include "trf/topology.hpp"

namespace py = pybind11;

// User ids cross the boundary as plain ints.
namespace pybind11::detail {
template <>
struct type_caster<trf::UserId> {
  PYBIND11_TYPE_CASTER(trf::UserId, const_name("int"));
  bool load(handle src, bool convert) {
    type_caster<std::uint64_t> inner;
    if (!inner.load(src, convert)) return false;
    value = trf::user_id(static_cast<std::uint64_t>(inner));
    return true;
  }
  static handle cast(trf::UserId u, return_value_policy, handle) {
    return PyLong_FromUnsignedLongLong(trf::to_int(u));
  }
};
}  // namespace pybind11::detail

using namespace trf;

namespace {

SimConfig make_config(const TemporalDigraph& graph, const py::dict& settings) {
  SimConfig c;
  for (auto [k, v] : settings) {
    const auto key = py::str(k).cast<std::string>();
    std::string value;
    if (py::isinstance<py::tuple>(v) || py::isinstance<py::list>(v)) {
      const auto seq = v.cast<std::vector<double>>();
      for (std::size_t i = 0; i < seq.size(); ++i) value += (i ? ", " : "") + format_number(seq[i]);
    } else if (py::isinstance<py::float_>(v)) {
      value = format_number(v.cast<double>());
    } else {
      value = py::str(v).cast<std::string>();
    }
    apply_config_entry(c, key, value, "");
  }
  c.initial_graph = graph;
  c.validate();
  return c;
}

py::dict event_dict(const Event& e) {
  py::dict d;
  d["t"] = e.t;
  if (const auto* t = e.tweet()) {
    d["kind"] = "tweet";
    d["author"] = t->author;
    d["msg"] = to_int(t->msg);
  } else if (const auto* r = e.retweet()) {
    d["kind"] = "retweet";
    d["repeater"] = r->repeater;
    d["msg"] = to_int(r->msg);
    d["origin_author"] = r->origin_author;
    d["origin_t"] = r->origin_t;
  } else {
    const auto* f = e.follow();
    d["kind"] = "follow";
    d["follower"] = f->follower;
    d["followee"] = f->followee;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tweet-retweet-follow simulation and analysis";

  static py::handle trf_error = py::exception<Error>(m, "TrfError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(trf_error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<TemporalDigraph>(m, "Graph")
      .def(py::init<>())
      .def("add_user", &TemporalDigraph::add_user)
      .def("add_follow", &TemporalDigraph::add_follow, py::arg("follower"), py::arg("followee"),
           py::arg("t") = 0.0)
      .def("has_edge", &TemporalDigraph::has_edge)
      .def("edge_at", &TemporalDigraph::edge_at)
      .def("followers_at", &TemporalDigraph::followers_at)
      .def("followees_at", &TemporalDigraph::followees_at)
      .def("users", &TemporalDigraph::users)
      .def("edges",
           [](const TemporalDigraph& g) {
             std::vector<std::tuple<UserId, UserId, double>> out;
             for (const auto& e : g.edges()) out.emplace_back(e.follower, e.followee, e.created_at);
             return out;
           })
      .def_property_readonly("user_count", &TemporalDigraph::user_count)
      .def_property_readonly("edge_count", &TemporalDigraph::edge_count)
      .def("save", [](const TemporalDigraph& g, const std::string& path) { save_graph_csv(path, g); })
      .def_static("load", &load_graph_csv)
      .def_static(
          "synth",
          [](const std::string& family, std::size_t size, double edge_prob, std::uint64_t seed) {
            return synth_graph(parse_graph_family(family), size, edge_prob, seed);
          },
          py::arg("family"), py::arg("size"), py::arg("edge_prob") = 0.0, py::arg("seed") = 0);

  m.def("trf_probability", [](double p, double q, std::uint32_t n) { return trf_probability({p, q}, n); },
        py::arg("p"), py::arg("q"), py::arg("n"));

  m.def(
      "simulate",
      [](const TemporalDigraph& graph, const py::kwargs& settings) {
        const auto config = make_config(graph, settings);
        SimulationResult r;
        {
          py::gil_scoped_release nogil;
          r = run_simulation(config);
        }
        py::dict out;
        out["log"] = py::cast(std::move(r.log));
        py::list truth;
        for (const auto& t : r.trf)
          truth.append(py::make_tuple(t.speaker, t.repeater, t.listener, t.t_s, t.t_r, t.t_l,
                                      t.n_received, t.reciprocal));
        out["ground_truth"] = truth;
        out["final_graph"] = r.final_graph;
        py::dict stats;
        stats["tweets"] = r.stats.tweets;
        stats["retweets"] = r.stats.retweets;
        stats["deliveries"] = r.stats.deliveries;
        stats["trf_follows"] = r.stats.trf_follows;
        stats["exogenous_follows"] = r.stats.exogenous_follows;
        stats["groups"] = r.stats.groups;
        out["stats"] = stats;
        return out;
      },
      py::arg("graph"));

  py::class_<Event>(m, "Event")
      .def_readonly("t", &Event::t)
      .def_property_readonly("kind", [](const Event& e) { return event_dict(e)["kind"]; })
      .def("as_dict", &event_dict)
      .def("__repr__", &serialize_event);

  m.def("load_log", &load_log);

  m.def(
      "detect",
      [](const EventLog& log, const TemporalDigraph& graph, double delta) {
        std::vector<std::tuple<UserId, UserId, UserId, double, double, double, bool>> out;
        for (const auto& d : detect_trf(log, graph, delta))
          out.emplace_back(d.speaker, d.repeater, d.listener, d.t_s, d.t_r, d.t_l, d.reciprocal);
        return out;
      },
      py::arg("log"), py::arg("graph"), py::arg("delta") = 86400.0);

  m.def(
      "estimate_p_trf",
      [](const EventLog& log, const TemporalDigraph& graph, double delta, const std::string& stratum) {
        const auto follows = follow_times(log);
        const auto deliveries = retweet_deliveries(log, graph);
        const auto groups = group_retweets(deliveries, follows, delta);
        std::vector<std::tuple<std::uint32_t, std::uint64_t, std::uint64_t, double>> out;
        for (const auto& r : estimate_p_trf(groups, parse_stratum(stratum), true))
          out.emplace_back(r.n, r.groups, r.followers, r.probability);
        return out;
      },
      py::arg("log"), py::arg("graph"), py::arg("delta") = 86400.0, py::arg("stratum") = "all");

  m.def(
      "fit_pq",
      [](const std::vector<std::tuple<std::uint32_t, std::uint64_t, std::uint64_t>>& rows) {
        std::vector<FitRow> in;
        for (auto [n, groups, follows] : rows) in.push_back({n, groups, follows});
        const auto r = fit_pq(in);
        py::dict d;
        d["p"] = r.params.p;
        d["q"] = r.params.q;
        d["nll"] = r.nll;
        d["deviance"] = r.deviance;
        d["se_p"] = r.se_p;
        d["se_q"] = r.se_q;
        return d;
      },
      py::arg("rows"));

  m.def(
      "logistic_fit",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
        const auto r = logistic_fit(x, y);
        return py::make_tuple(r.coefficients, r.standard_errors, r.converged);
      },
      py::arg("features"), py::arg("labels"));

  m.def("scc_sizes", [](const TemporalDigraph& g) { return tarjan_scc(g).sizes; });
  m.def("largest_scc_fraction", [](const TemporalDigraph& g) { return tarjan_scc(g).largest_fraction; });
  m.def("trf_closure", &trf_closure);
  m.def("is_trf_equilibrium", &is_trf_equilibrium);
  m.def("reachable_followees", &reachable_followees);
  m.def(
      "sample",
      [](const TemporalDigraph& g, const std::string& method, std::size_t size, std::uint64_t seed) {
        return parse_sample_method(method) == SampleMethod::snowball
                   ? snowball_sample(g, size, seed)
                   : random_walk_sample(g, size, 0.15, seed);
      },
      py::arg("graph"), py::arg("method"), py::arg("size"), py::arg("seed") = 0);

  // Same entry point as the command-line tool; returns (exit code, stdout, stderr).
  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
