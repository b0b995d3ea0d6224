// Copyright 2026  The lddisc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the main lddisc operations.

#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lddisc/cli.hpp"
#include "lddisc/codebook.hpp"
#include "lddisc/corpus.hpp"
#include "lddisc/corpus_io.hpp"
#include "lddisc/error.hpp"
#include "lddisc/lda.hpp"
#include "lddisc/manifest.hpp"
#include "lddisc/metrics.hpp"
#include "lddisc/synth.hpp"

namespace py = pybind11;
using namespace lddisc;

namespace {

py::array_t<double> to_numpy(const Matrix &m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unsupervised acoustic domain discovery: codebook, LDA and consistency metrics.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<FeatureSegment>(m, "FeatureSegment")
      .def_readonly("id", &FeatureSegment::id)
      .def_readonly("label", &FeatureSegment::label)
      .def_property_readonly("num_frames", &FeatureSegment::num_frames)
      .def_property_readonly("frames", [](const FeatureSegment &s) {
        py::array_t<float> out({s.num_frames(), s.dim});
        std::copy(s.values.begin(), s.values.end(), out.mutable_data());
        return out;
      });

  py::class_<FeatureCorpus>(m, "FeatureCorpus")
      .def_readonly("dim", &FeatureCorpus::dim)
      .def_readonly("segments", &FeatureCorpus::segments)
      .def("__len__", &FeatureCorpus::size)
      .def("total_frames", &FeatureCorpus::total_frames)
      .def("add_segment",
           [](FeatureCorpus &c, std::string id, std::optional<std::string> label,
              py::array_t<float, py::array::c_style | py::array::forcecast> frames) {
             if (frames.ndim() != 2) throw InputError("frames must be a 2-D array");
             if (c.dim == 0) c.dim = static_cast<std::size_t>(frames.shape(1));
             if (static_cast<std::size_t>(frames.shape(1)) != c.dim) throw InputError("frame dimension mismatch");
             FeatureSegment s{std::move(id), std::move(label), c.dim,
                              std::vector<float>(frames.data(), frames.data() + frames.size())};
             c.segments.push_back(std::move(s));
           },
           py::arg("id"), py::arg("label"), py::arg("frames"))
      .def(py::init<>());

  py::class_<QuantizedSegment>(m, "QuantizedSegment")
      .def_readonly("id", &QuantizedSegment::id)
      .def_readonly("label", &QuantizedSegment::label)
      .def_readonly("words", &QuantizedSegment::words);

  py::class_<QuantizedCorpus>(m, "QuantizedCorpus")
      .def_readonly("vocab_size", &QuantizedCorpus::vocab_size)
      .def_readonly("segments", &QuantizedCorpus::segments)
      .def("__len__", &QuantizedCorpus::size)
      .def("total_words", &QuantizedCorpus::total_words);

  m.def("read_features", py::overload_cast<const std::filesystem::path &>(&read_features));
  m.def("write_features",
        [](const FeatureCorpus &c, const std::filesystem::path &p, bool text) {
          write_features(c, p, text ? FileFormat::text : FileFormat::binary);
        },
        py::arg("corpus"), py::arg("path"), py::arg("text") = false);
  m.def("read_quantized", py::overload_cast<const std::filesystem::path &>(&read_quantized));
  m.def("write_quantized",
        [](const QuantizedCorpus &c, const std::filesystem::path &p, bool text) {
          write_quantized(c, p, text ? FileFormat::text : FileFormat::binary);
        },
        py::arg("corpus"), py::arg("path"), py::arg("text") = false);

  m.def(
      "synthesize_gaussian",
      [](std::size_t num_sources, std::size_t segments_per_source, std::size_t frames_per_segment, std::size_t dim,
         std::size_t bimodal_sources, std::uint64_t seed) {
        GaussianPreset p;
        p.num_sources = num_sources;
        p.segments_per_source = segments_per_source;
        p.frames_per_segment = frames_per_segment;
        p.dim = dim;
        p.bimodal_sources = bimodal_sources;
        p.seed = seed;
        return synthesize(make_gaussian_spec(p)).corpus;
      },
      py::arg("num_sources") = 6, py::arg("segments_per_source") = 110, py::arg("frames_per_segment") = 200,
      py::arg("dim") = 13, py::arg("bimodal_sources") = 1, py::arg("seed") = 0);
  m.def("split", py::overload_cast<const FeatureCorpus &, double, std::uint64_t>(&split), py::arg("corpus"),
        py::arg("fraction"), py::arg("seed"));

  py::class_<Codebook>(m, "Codebook")
      .def_property_readonly("size", &Codebook::size)
      .def_property_readonly("dim", &Codebook::dim)
      .def_property_readonly("training_distortion", &Codebook::training_distortion)
      .def_property_readonly("means", [](const Codebook &c) {
        py::array_t<float> out({c.size(), c.dim()});
        std::copy(c.means().begin(), c.means().end(), out.mutable_data());
        return out;
      });
  m.def(
      "train_codebook",
      [](const FeatureCorpus &corpus, std::size_t size, std::size_t em_iters, double split_epsilon, double tol,
         bool normalize) {
        VqTrainConfig cfg;
        cfg.target_size = size;
        cfg.em_iters_per_level = em_iters;
        cfg.split_epsilon = split_epsilon;
        cfg.convergence_tol = tol;
        cfg.normalize = normalize;
        py::gil_scoped_release release;
        return train_codebook(corpus, cfg).codebook;
      },
      py::arg("corpus"), py::arg("size") = 2048, py::arg("em_iters_per_level") = 20, py::arg("split_epsilon") = 0.05,
      py::arg("convergence_tol") = 1e-5, py::arg("normalize") = true);
  m.def("quantize_frame",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> frame, const Codebook &cb) {
          return quantize_frame({frame.data(), static_cast<std::size_t>(frame.size())}, cb);
        });
  m.def("quantize_corpus", &quantize_corpus, py::call_guard<py::gil_scoped_release>());
  m.def("distortion", &distortion);
  m.def("read_codebook", [](const std::filesystem::path &p) { return read_codebook(p); });
  m.def("write_codebook", [](const Codebook &c, const std::filesystem::path &p) { write_codebook(c, p); });

  py::class_<LdaModel>(m, "LdaModel")
      .def_readonly("num_topics", &LdaModel::num_topics)
      .def_readonly("vocab_size", &LdaModel::vocab_size)
      .def_readonly("alpha", &LdaModel::alpha)
      .def_property_readonly("beta", [](const LdaModel &model) { return to_numpy(topic_word_probabilities(model)); });
  py::class_<LdaTrainResult>(m, "LdaTrainResult")
      .def_readonly("model", &LdaTrainResult::model)
      .def_readonly("elbo_trace", &LdaTrainResult::elbo_trace)
      .def_readonly("alpha_trace", &LdaTrainResult::alpha_trace)
      .def_readonly("iterations", &LdaTrainResult::iterations)
      .def_readonly("converged", &LdaTrainResult::converged);
  m.def(
      "train_lda",
      [](const QuantizedCorpus &corpus, std::size_t num_domains, std::uint64_t seed, bool estimate_alpha,
         double alpha, std::size_t max_em_iters) {
        LdaTrainConfig cfg;
        cfg.num_topics = num_domains;
        cfg.seed = seed;
        cfg.alpha_mode = estimate_alpha ? AlphaMode::estimate : AlphaMode::fixed;
        cfg.alpha = alpha;
        cfg.max_em_iters = max_em_iters;
        py::gil_scoped_release release;
        return train(corpus, cfg);
      },
      py::arg("corpus"), py::arg("num_domains") = 8, py::arg("seed") = 0, py::arg("estimate_alpha") = true,
      py::arg("alpha") = 1.0, py::arg("max_em_iters") = 100);
  m.def(
      "infer",
      [](const QuantizedCorpus &corpus, const LdaModel &model) {
        std::vector<SegmentPosterior> posts;
        {
          py::gil_scoped_release release;
          EStepOptions opts;
          opts.keep_phi = false;
          posts = infer(corpus, model, opts);
        }
        py::array_t<double> gamma({posts.size(), model.num_topics});
        auto g = gamma.mutable_unchecked<2>();
        for (std::size_t i = 0; i < posts.size(); ++i)
          for (std::size_t k = 0; k < model.num_topics; ++k) g(i, k) = posts[i].gamma[k];
        return gamma;
      },
      "Variational Dirichlet parameters, one row per segment.");
  m.def("assign_domains", [](py::array_t<double, py::array::c_style | py::array::forcecast> gamma) {
    if (gamma.ndim() != 2) throw InputError("gamma must be a 2-D array");
    std::vector<std::size_t> out;
    const std::size_t K = static_cast<std::size_t>(gamma.shape(1));
    for (py::ssize_t i = 0; i < gamma.shape(0); ++i)
      out.push_back(assign_domain(std::vector<double>(gamma.data(i, 0), gamma.data(i, 0) + K)));
    return out;
  });
  m.def("read_model", [](const std::filesystem::path &p) { return read_model(p); });
  m.def("write_model", [](const LdaModel &model, const std::filesystem::path &p) { write_model(model, p); });

  m.def(
      "smooth", [](const std::vector<double> &counts, double discount) { return smooth(counts, discount); },
      py::arg("counts"),
        py::arg("discount") = kDefaultDiscount);
  m.def("kl_divergence", [](const std::vector<double> &p, const std::vector<double> &q) { return kl_divergence(p, q); });

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "lddisc");
        std::vector<char *> argv;
        for (auto &a : args) argv.push_back(a.data());
        return cli::run(static_cast<int>(argv.size()), argv.data());
      },
      "Run an lddisc command line; returns the exit code.");
}
