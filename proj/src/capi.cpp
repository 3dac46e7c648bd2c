#include "shum.h"

#include <exception>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "experiment.hpp"

struct shum_experiment {
    shum::ExperimentConfig cfg;
    std::string output;
    std::string message;
};

namespace {

shum_status to_status(shum::errc code) { return static_cast<shum_status>(code); }

// Every entry point funnels through here so exceptions never cross the ABI.
template <typename Fn>
shum_status guarded(shum_experiment* exp, Fn&& fn) {
    if (!exp) return SHUM_ERROR_INTERNAL;
    exp->message.clear();
    try {
        return fn();
    } catch (const shum::error& e) {
        exp->message = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        exp->message = "out of memory";
        return SHUM_ERROR_INTERNAL;
    } catch (const std::exception& e) {
        exp->message = e.what();
        return SHUM_ERROR_INTERNAL;
    }
}

} // namespace

extern "C" {

shum_experiment* shum_experiment_create(void) {
    return new (std::nothrow) shum_experiment;
}

void shum_experiment_destroy(shum_experiment* exp) { delete exp; }

shum_status shum_experiment_set(shum_experiment* exp, const char* key, const char* value) {
    return guarded(exp, [&]() -> shum_status {
        if (!key || !value) {
            exp->message = "key and value must not be NULL";
            return SHUM_ERROR_CONFIG;
        }
        shum::apply_setting(exp->cfg, key, value, std::string("flag --") + key);
        return SHUM_OK;
    });
}

shum_status shum_experiment_load_config(shum_experiment* exp, const char* path) {
    return guarded(exp, [&]() -> shum_status {
        if (!path) {
            exp->message = "config path must not be NULL";
            return SHUM_ERROR_CONFIG;
        }
        shum::load_config_file(exp->cfg, path);
        return SHUM_OK;
    });
}

shum_status shum_experiment_run(shum_experiment* exp, const char* subcommand) {
    return guarded(exp, [&]() -> shum_status {
        exp->output.clear();
        if (!subcommand) {
            exp->message = "subcommand must not be NULL";
            return SHUM_ERROR_CONFIG;
        }
        shum::ExperimentConfig cfg = exp->cfg;
        shum::finalize_config(cfg);
        shum::RunOutcome outcome = shum::run_subcommand(subcommand, cfg);
        exp->output = std::move(outcome.output);
        exp->message = std::move(outcome.message);
        return to_status(outcome.status);
    });
}

const char* shum_experiment_output(const shum_experiment* exp) {
    return exp ? exp->output.c_str() : "";
}

const char* shum_experiment_error(const shum_experiment* exp) {
    return exp ? exp->message.c_str() : "";
}

const char* shum_status_name(shum_status status) {
    switch (status) {
    case SHUM_OK: return "ok";
    case SHUM_ERROR_VERIFICATION: return "verification";
    case SHUM_ERROR_CONFIG: return "config";
    case SHUM_ERROR_NUMERIC: return "numeric";
    case SHUM_ERROR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* shum_version(void) { return "1.0.0"; }

} // extern "C"
