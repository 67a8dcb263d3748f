#ifndef HARDYFORGE_H
#define HARDYFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HF_API __declspec(dllexport)
#else
#define HF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hf_status {
  HF_OK = 0,
  HF_ERR_INVALID_ARGUMENT = 1,
  HF_ERR_DIMENSION = 2,
  HF_ERR_PARSE = 3,
  HF_ERR_NOT_ENTANGLED = 4,
  HF_ERR_CONSTRUCTION = 5,
  HF_ERR_RANGE = 6,
  HF_ERR_NON_ORTHONORMAL = 7,
  HF_ERR_INTERNAL = 99
} hf_status;

typedef struct hf_state hf_state;

typedef struct hf_options {
  uint64_t seed;
  int restarts;      /* 0 selects 16 + 8n */
  double tol;
  double margin;
  int policy_search; /* nonzero enables the complement-policy search */
  int max_n;
} hf_options;

HF_API const char* hf_version(void);

/* Message of the last failed call on this thread; never NULL. */
HF_API const char* hf_last_error(void);

HF_API void hf_options_default(hf_options* options);

/* States are normalized on creation. */
HF_API hf_status hf_state_from_json(const char* json, hf_state** out);
HF_API hf_status hf_state_load(const char* path, hf_state** out);
HF_API hf_status hf_state_haar(const int* dims, size_t n, uint64_t seed, hf_state** out);
HF_API hf_status hf_state_to_json(const hf_state* state, char** out);
HF_API int hf_state_parties(const hf_state* state);
HF_API double hf_state_input_norm(const hf_state* state);
HF_API void hf_state_free(hf_state* state);

/* Strings returned through char** are owned by the caller; release with hf_string_free. */
HF_API void hf_string_free(char* s);

/* Full pipeline. *exit_code: 0 pass, 2 not entangled, 3 construction failure
   or no violation. The certificate is produced in every case. */
HF_API hf_status hf_certify(const hf_state* state, const hf_options* options, char** certificate_json,
                            int* exit_code);

/* Settings JSON (with frame export) for an entangled state. */
HF_API hf_status hf_construct(const hf_state* state, const hf_options* options, char** settings_json);

/* Report JSON for given settings; *violation is 1 when the value exceeds the bound. */
HF_API hf_status hf_evaluate(const hf_state* state, const char* settings_json, const hf_options* options,
                             char** report_json, int* violation);

/* Exhaustive classical maximum for 2 <= n <= 13. */
HF_API hf_status hf_lhv(int n, char** summary_json);

HF_API hf_status hf_example(const char* name, int n, const hf_options* options, char** report_json,
                            char** table, int* pass);

HF_API hf_status hf_random_batch(const int* dims, size_t n, uint64_t seed, int count, const hf_options* options,
                                 char** summary_json);

#ifdef __cplusplus
}
#endif

#endif
