/* tiermon — two-tier remote-monitoring Markov chain solver, analyzer, and simulator.
 *
 * Conventions:
 *   - every function returns a tiermon_status; TIERMON_OK means success
 *   - on failure, tiermon_last_error() returns a message (thread-local storage, valid
 *     until the next failing call on the same thread)
 *   - char** outputs receive a malloc'd NUL-terminated string; release with
 *     tiermon_string_free
 *   - handle outputs receive an owned object; release with the matching _free
 *   - TIERMON_NOT_CONVERGED from tiermon_solve still populates the result handle so the
 *     best iterate and its diagnostics can be inspected
 */
#ifndef TIERMON_H
#define TIERMON_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tiermon_status {
    TIERMON_OK = 0,
    TIERMON_INVALID_ARGUMENT = 1,
    TIERMON_VALIDATION = 2,
    TIERMON_NOT_CONVERGED = 3,
    TIERMON_IO = 4,
    TIERMON_DOMAIN = 5,
    TIERMON_TOO_LARGE = 6,
    TIERMON_INTERNAL = 7
} tiermon_status;

typedef struct tiermon_model tiermon_model;
typedef struct tiermon_policy tiermon_policy;
typedef struct tiermon_solve_result tiermon_solve_result;
typedef struct tiermon_sweep tiermon_sweep;

const char* tiermon_version(void);
const char* tiermon_generator_id(void);
const char* tiermon_last_error(void);
void tiermon_string_free(char* s);

/* ---- model ----
 * Model JSON fields: {"H","lambda_o","lambda_i","C_o","C_i","C_c","C_oi","C_io","gamma"};
 * C_oi/C_io default to 0 when absent; unknown fields are rejected. Parsing does not
 * validate the assumptions; tiermon_model_validate reports them. */
tiermon_status tiermon_model_from_json(const char* json, tiermon_model** out);
tiermon_status tiermon_model_to_json(const tiermon_model* m, char** out);
/* report: {"ok":bool,"violations":[...],"warnings":[...]}; status is TIERMON_OK even when
 * the model is invalid — the report is the result */
tiermon_status tiermon_model_validate(const tiermon_model* m, char** report_json);
void tiermon_model_free(tiermon_model* m);

/* ---- policies ----
 * spec JSON: {"family":"always_ordinary"|"always_intensive"|"optimal"} or
 * {"family":"threshold","h_bar":n} or {"family":"two_threshold","lower":a,"upper":b} or
 * {"actions":{"ordinary":["o"|"i",...],"intensive":[...]}} ("optimal" solves the model) */
tiermon_status tiermon_policy_from_spec(const tiermon_model* m, const char* spec_json,
                                        tiermon_policy** out);
tiermon_status tiermon_policy_to_json(const tiermon_policy* p, char** out);
tiermon_status tiermon_policy_classify(const tiermon_policy* p, char** class_json);
void tiermon_policy_free(tiermon_policy* p);

/* ---- solving ---- */
tiermon_status tiermon_solve(const tiermon_model* m, double epsilon, long max_iter,
                             tiermon_solve_result** out);
tiermon_status tiermon_bruteforce(const tiermon_model* m, tiermon_solve_result** out);
tiermon_status tiermon_solve_result_to_json(const tiermon_solve_result* r, char** out);
tiermon_status tiermon_solve_result_policy(const tiermon_solve_result* r, tiermon_policy** out);
tiermon_status tiermon_solve_result_table(const tiermon_solve_result* r, char** out);
void tiermon_solve_result_free(tiermon_solve_result* r);

/* values_json: {"ordinary":[v0..vH],"intensive":[v0..vH]}; direct != 0 solves the linear
 * system, 0 iterates to epsilon */
tiermon_status tiermon_policy_evaluate(const tiermon_model* m, const tiermon_policy* p,
                                       int direct, double epsilon, char** values_json);

/* ---- asymptotic closed forms ---- */
tiermon_status tiermon_check_json(const tiermon_model* m, char** report_json);
tiermon_status tiermon_check_table(const tiermon_model* m, char** out);
/* free_param: "cost_ratio" | "lambda_i" | "gamma"; out: JSON array of roots, ascending */
tiermon_status tiermon_boundary_json(const tiermon_model* m, const char* free_param, char** out);

/* ---- simulation ----
 * tier: "o" or "i" (the starting monitoring tier); max_steps 0 picks the discount horizon */
tiermon_status tiermon_simulate_csv(const tiermon_model* m, const tiermon_policy* p,
                                    const char* tier, int h0, uint64_t seed, long max_steps,
                                    char** csv);
tiermon_status tiermon_estimate_value(const tiermon_model* m, const tiermon_policy* p,
                                      const char* tier, int h0, long n, uint64_t seed,
                                      char** json);
/* max_steps 0 picks the default horizon */
tiermon_status tiermon_estimate_hitting_mgf(const tiermon_model* m, int h0, long n,
                                            uint64_t seed, long max_steps, char** json);

/* ---- parameter sweeps ----
 * spec JSON: {"free":"cost_ratio"|"lambda_i"|"gamma"|"C_oi_C_io",
 *             "grid":[...strictly increasing...], "annotate_boundary":bool} */
tiermon_status tiermon_sweep_run(const tiermon_model* m, const char* spec_json,
                                 tiermon_sweep** out);
tiermon_status tiermon_sweep_csv(const tiermon_sweep* s, char** out);
tiermon_status tiermon_sweep_svg(const tiermon_sweep* s, char** out);
tiermon_status tiermon_sweep_json(const tiermon_sweep* s, char** out);
void tiermon_sweep_free(tiermon_sweep* s);

/* ---- numeric-vs-asymptotic value comparison ---- */
tiermon_status tiermon_compare_csv(const tiermon_model* m, char** out);
tiermon_status tiermon_compare_svg(const tiermon_model* m, char** out);
tiermon_status tiermon_compare_json(const tiermon_model* m, char** out);

#ifdef __cplusplus
}
#endif

#endif /* TIERMON_H */
