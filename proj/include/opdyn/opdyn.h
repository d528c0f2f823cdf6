#ifndef OPDYN_H
#define OPDYN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OPDYN_API __declspec(dllexport)
#else
#define OPDYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum opdyn_status {
  OPDYN_OK = 0,
  OPDYN_INVALID_ARGUMENT = 1,
  OPDYN_CONFIG_ERROR = 2,
  OPDYN_NUMERICAL_ERROR = 3,
  OPDYN_IO_ERROR = 4,
  OPDYN_INTERNAL_ERROR = 5
} opdyn_status;

typedef struct opdyn_graph opdyn_graph;

/* Message of the last failed call on this thread; never NULL. */
OPDYN_API const char* opdyn_last_error(void);
OPDYN_API const char* opdyn_version(void);

/* Row-major n x n weights, a[i*n+j] is the weight agent i gives agent j. Diagonal must be zero. */
OPDYN_API opdyn_status opdyn_graph_create(const double* weights, size_t n, opdyn_graph** out);
/* Same document format as the "graph" key of run configs. */
OPDYN_API opdyn_status opdyn_graph_from_json(const char* json_text, opdyn_graph** out);
OPDYN_API void opdyn_graph_destroy(opdyn_graph* g);
OPDYN_API size_t opdyn_graph_size(const opdyn_graph* g);
OPDYN_API opdyn_status opdyn_graph_is_strongly_connected(const opdyn_graph* g, int* out);
OPDYN_API opdyn_status opdyn_graph_lambda2(const opdyn_graph* g, double* out);
/* Left null vector of the Laplacian, normalized to sum 1. out has size() entries. */
OPDYN_API opdyn_status opdyn_graph_left_null_vector(const opdyn_graph* g, double* out);

/* dx/ds = -D x + u A tanh(x) + beta. beta may be NULL for zero. */
OPDYN_API opdyn_status opdyn_normalized_field(const opdyn_graph* g, double u, const double* beta, const double* x,
                                              double* dx);

OPDYN_API opdyn_status opdyn_y_s(double u, double* out);
OPDYN_API opdyn_status opdyn_ustar_series(double beta, int n_agents, int n3, double* out);
OPDYN_API opdyn_status opdyn_ustar_numeric(int n_agents, int n3, double beta, double* out);
OPDYN_API opdyn_status opdyn_us_star_hat(double nu, int n_agents, int n3, double* out);

/* Runs a command ("simulate", "continue", "sweep", "adaptive") and writes artifacts into out_dir.
   variant is the sweep scenario or adaptive case and may be NULL. config_json may be NULL for defaults.
   On success *summary_json (if non-NULL) receives a string to release with opdyn_string_free. */
OPDYN_API opdyn_status opdyn_run(const char* command, const char* variant, const char* config_json,
                                 const char* out_dir, int jobs, int has_seed, uint64_t seed, char** summary_json);
/* Resolves a config without running it. command may be NULL if the config names one. */
OPDYN_API opdyn_status opdyn_validate(const char* command, const char* variant, const char* config_json,
                                      int has_seed, uint64_t seed, char** resolved_json);
OPDYN_API void opdyn_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
