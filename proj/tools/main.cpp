// bqi: implicitize biquadratic Bezier patches and work with the implicit
// form. Subcommands: implicitize, eval, classify, raycast, scan, study.
//
// Exit codes: 0 success, 1 degenerate input (zero resultant, collinear
// anchors, undefined scan direction), 2 malformed input, 3 internal error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bqi/bqi.hpp"

namespace {

using bqi::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bqi::input_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw bqi::input_error("cannot open '" + path + "' for writing");
    out << content;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

bqi::NetVariant load_net(const std::string& path) {
    return bqi::net_from_json_text(read_file(path));
}

bqi::Point3 parse_triplet(const std::vector<double>& v, const char* what) {
    if (v.size() != 3) throw bqi::input_error(std::string(what) + ": expected three numbers");
    return bqi::Point3(v[0], v[1], v[2]);
}

struct ImplicitizeArgs {
    std::string net_path, poly_path, slp_path, out_path;
    bool normalize = false;
};

int run_implicitize(const ImplicitizeArgs& a) {
    auto net = load_net(a.net_path);
    json summary;
    auto process = [&](const auto& n) {
        bqi::CayleyMatrix cm;
        if (a.normalize) {
            auto [nn, t] = bqi::normalize_net(n);
            cm = bqi::build_cayley_matrix(nn);
            summary["normalized"] = true;
            summary["transform"] = bqi::transform_to_json(t);
        } else {
            cm = bqi::build_cayley_matrix(n);
            summary["normalized"] = false;
        }
        bqi::TrivariatePoly poly = bqi::expand_resultant(cm);
        bqi::StraightLineProgram prog = bqi::emit_slp(poly);
        summary["kind"] = bqi::to_string(cm.kind);
        summary["n"] = cm.n;
        summary["max_degree"] = poly.max_degree;
        summary["achieved_degree"] = poly.total_degree();
        summary["terms"] = poly.terms.size();
        summary["muls"] = prog.mul_count();
        summary["adds"] = prog.add_count();
        if (!a.poly_path.empty()) write_file(a.poly_path, bqi::poly_to_json(poly).dump() + "\n");
        if (!a.slp_path.empty()) write_file(a.slp_path, bqi::slp_to_text(prog));
    };
    std::visit(process, net);
    emit(a.out_path, summary.dump() + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicitize biquadratic Bezier triangle and quad patches via the "
                 "Dixon/Cayley resultant and use the implicit form"};
    app.require_subcommand(1);

    // implicitize
    ImplicitizeArgs imp;
    auto* cmd_imp = app.add_subcommand(
        "implicitize", "Expand a net's implicit equation; write poly JSON and SLP text");
    cmd_imp->add_option("net", imp.net_path, "control net JSON file")->required();
    cmd_imp->add_option("--poly", imp.poly_path, "output path for the polynomial JSON");
    cmd_imp->add_option("--slp", imp.slp_path, "output path for the straight-line program");
    cmd_imp->add_option("-o,--out", imp.out_path, "summary output path (default stdout)");
    cmd_imp->add_flag("--normalize", imp.normalize, "apply the anchor pre-transform first");

    // eval
    std::string eval_net, eval_out;
    double eval_u = 0, eval_v = 0;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate the parametric map at (u, v)");
    cmd_eval->add_option("net", eval_net)->required();
    cmd_eval->add_option("-u", eval_u, "parameter u")->required();
    cmd_eval->add_option("-v", eval_v, "parameter v")->required();
    cmd_eval->add_option("-o,--out", eval_out);

    // classify
    std::string cls_net, cls_out;
    std::vector<double> cls_point;
    double cls_rel_tol = 1e-9;
    auto* cmd_cls = app.add_subcommand("classify", "Classify a point against the surface");
    cmd_cls->add_option("net", cls_net)->required();
    cmd_cls->add_option("--point", cls_point, "query point x y z")->expected(3)->required();
    cmd_cls->add_option("--rel-tol", cls_rel_tol, "relative tolerance (default 1e-9)");
    cmd_cls->add_option("-o,--out", cls_out);

    // raycast
    std::string ray_net, ray_out;
    std::vector<double> ray_origin, ray_dir;
    double ray_t0 = 0.0, ray_t1 = 1.0;
    auto* cmd_ray = app.add_subcommand("raycast", "Intersect a ray with the patch");
    cmd_ray->add_option("net", ray_net)->required();
    cmd_ray->add_option("--origin", ray_origin, "ray origin x y z")->expected(3)->required();
    cmd_ray->add_option("--dir", ray_dir, "ray direction x y z (normalized internally)")
        ->expected(3)
        ->required();
    cmd_ray->add_option("--tmin", ray_t0, "lower t bound")->required();
    cmd_ray->add_option("--tmax", ray_t1, "upper t bound")->required();
    cmd_ray->add_option("-o,--out", ray_out);

    // scan
    std::string scan_net, scan_out;
    double scan_u = 0.33, scan_v = 0.33, scan_t0 = -1.0, scan_t1 = 1.0;
    int scan_n = 1001;
    bool scan_norm = false;
    auto* cmd_scan = app.add_subcommand(
        "scan", "Sample the implicit function and determinant along p + t*vhat");
    cmd_scan->add_option("net", scan_net)->required();
    cmd_scan->add_option("-u", scan_u, "parameter u of the scan center (default 0.33)");
    cmd_scan->add_option("-v", scan_v, "parameter v of the scan center (default 0.33)");
    cmd_scan->add_option("--tmin", scan_t0, "lower t bound (default -1)");
    cmd_scan->add_option("--tmax", scan_t1, "upper t bound (default 1)");
    cmd_scan->add_option("--samples", scan_n, "sample count (default 1001)");
    cmd_scan->add_flag("--normalize", scan_norm, "evaluate in the normalized frame");
    cmd_scan->add_option("-o,--out", scan_out);

    // study
    std::string study_net, study_out;
    std::vector<double> study_offsets = {0.0, 1e4, 6.5e4, 1e6, 1e13};
    double study_u = 0.33, study_v = 0.33;
    int study_n = 1001;
    auto* cmd_study = app.add_subcommand(
        "study", "Offset precision study: crossing detection with and without normalization");
    cmd_study->add_option("net", study_net)->required();
    cmd_study->add_option("--offsets", study_offsets,
                          "offset magnitudes (default 0 1e4 6.5e4 1e6 1e13)");
    cmd_study->add_option("-u", study_u, "parameter u of the scan center (default 0.33)");
    cmd_study->add_option("-v", study_v, "parameter v of the scan center (default 0.33)");
    cmd_study->add_option("--samples", study_n, "samples per scan (default 1001)");
    cmd_study->add_option("-o,--out", study_out);

    try {
        app.parse(argc, argv);

        if (cmd_imp->parsed()) return run_implicitize(imp);

        if (cmd_eval->parsed()) {
            auto net = load_net(eval_net);
            bqi::Point3 p = std::visit(
                [&](const auto& n) {
                    using Net = std::decay_t<decltype(n)>;
                    constexpr auto kind = std::is_same_v<Net, bqi::TriangleNet>
                                              ? bqi::PatchKind::triangle
                                              : bqi::PatchKind::quad;
                    return bqi::eval(n, bqi::DomainPoint::at(kind, eval_u, eval_v));
                },
                net);
            json out{{"point", json::array({p.x, p.y, p.z})}};
            emit(eval_out, out.dump() + "\n");
            return 0;
        }

        if (cmd_cls->parsed()) {
            auto net = load_net(cls_net);
            bqi::Point3 q = parse_triplet(cls_point, "--point");
            auto cm = std::visit([](const auto& n) { return bqi::build_cayley_matrix(n); }, net);
            auto res = bqi::classify(cm, q, cls_rel_tol);
            json out{{"value", res.value},
                     {"verdict", bqi::to_string(res.verdict)},
                     {"tolerance_scale", res.tolerance_scale}};
            emit(cls_out, out.dump() + "\n");
            return 0;
        }

        if (cmd_ray->parsed()) {
            auto net = load_net(ray_net);
            bqi::Ray ray = bqi::Ray::through(parse_triplet(ray_origin, "--origin"),
                                             parse_triplet(ray_dir, "--dir").vec());
            if (!(ray_t0 < ray_t1)) throw bqi::input_error("raycast: need tmin < tmax");
            auto hits = std::visit(
                [&](const auto& n) { return bqi::raycast(n, ray, ray_t0, ray_t1); }, net);
            json arr = json::array();
            for (const auto& h : hits)
                arr.push_back(json{{"t", h.t},
                                   {"point", json::array({h.point.x, h.point.y, h.point.z})},
                                   {"uv", json::array({h.uv.u, h.uv.v})}});
            emit(ray_out, json{{"hits", arr}}.dump() + "\n");
            return 0;
        }

        if (cmd_scan->parsed()) {
            auto net = load_net(scan_net);
            auto recs = std::visit(
                [&](const auto& n) {
                    using Net = std::decay_t<decltype(n)>;
                    constexpr auto kind = std::is_same_v<Net, bqi::TriangleNet>
                                              ? bqi::PatchKind::triangle
                                              : bqi::PatchKind::quad;
                    return bqi::scan_line(n, bqi::DomainPoint::at(kind, scan_u, scan_v), scan_t0,
                                          scan_t1, scan_n, scan_norm);
                },
                net);
            emit(scan_out, bqi::scan_csv(recs));
            return 0;
        }

        if (cmd_study->parsed()) {
            auto net = load_net(study_net);
            bqi::StudyOptions opt;
            opt.u = study_u;
            opt.v = study_v;
            opt.n_samples = study_n;
            auto report = std::visit(
                [&](const auto& n) { return bqi::precision_study(n, study_offsets, opt); }, net);
            for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
            emit(study_out, bqi::study_csv(report));
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const bqi::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bqi::degenerate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const bqi::internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
