#include "stochy/model.hpp"
#include "stochy/task.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2 };

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochy: abstraction, verification and simulation of stochastic hybrid systems"};
    app.require_subcommand(1);

    std::string model_path, task_path, out_dir = "results";
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--model", model_path, "model document (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--task", task_path, "task document (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "result directory")->capture_default_str();
    };
    auto* run = app.add_subcommand("run", "run the task's engine and write its result files");
    auto* exp = app.add_subcommand("export", "write the FAUST abstraction in PRISM explicit format");
    auto* sim = app.add_subcommand("simulate", "run the task's simulation block");
    add_common(run);
    add_common(exp);
    add_common(sim);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        stochy::configure_threads_from_env();
        const auto model = stochy::load_model(model_path);
        const auto task = stochy::load_task(task_path);
        stochy::RunSummary s;
        if (run->parsed())
            s = stochy::run_task(model, task, out_dir);
        else if (exp->parsed())
            s = stochy::run_export(model, task, out_dir);
        else
            s = stochy::run_simulation(model, task, out_dir);
        std::cout << s.engine << ": " << s.states << " states, error " << s.error << ", " << s.seconds << " s\n";
        for (const auto& f : s.files)
            std::cout << "  " << out_dir << '/' << f << '\n';
        if (s.budget_exhausted)
            std::cout << "refinement budget exhausted before reaching the requested error\n";
        if (!s.converged)
            std::cout << "value iteration stopped at the iteration cap without converging\n";
        return kOk;
    } catch (const stochy::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}
