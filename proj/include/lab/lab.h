#ifndef LAB_LAB_H
#define LAB_LAB_H

/* C interface to the label-noise robustness lab. Everything runs behind
 * opaque handles and integer status codes; failing calls leave a message
 * retrievable with lab_last_error() on the same thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef LAB_API
#if defined(_WIN32)
#define LAB_API __declspec(dllexport)
#else
#define LAB_API __attribute__((visibility("default")))
#endif
#endif

typedef enum lab_status {
  LAB_OK = 0,
  LAB_ERR_INVALID_ARGUMENT = 1,
  LAB_ERR_CONFIG = 2,
  LAB_ERR_RUNTIME = 3,
  LAB_ERR_IO = 4
} lab_status;

typedef struct lab_config lab_config;   /* parsed experiment config */
typedef struct lab_dataset lab_dataset; /* labelled point set */

LAB_API const char* lab_version(void);

/* Message for the most recent failing lab_* call on this thread; valid until
 * the next lab_* call on the same thread. */
LAB_API const char* lab_last_error(void);

LAB_API lab_status lab_config_open(const char* path, lab_config** out);
LAB_API lab_status lab_config_parse(const char* text, lab_config** out);
LAB_API void lab_config_close(lab_config* cfg);

/* The experiment id named by the config ("noise-sweep", ...). Pointer is
 * owned by the handle. */
LAB_API const char* lab_config_experiment(const lab_config* cfg);

/* Schema check only; LAB_ERR_CONFIG carries the full problem list. */
LAB_API lab_status lab_config_validate(const lab_config* cfg);

typedef struct lab_run_options {
  const char* out_dir; /* NULL: the config's `out` */
  uint64_t seed;       /* honoured when has_seed != 0 */
  int has_seed;
  int threads; /* <= 0: the config's value; the LAB_THREADS env var wins over both */
} lab_run_options;

/* Validate and execute the experiment, writing its output files. opts may be
 * NULL for config defaults. */
LAB_API lab_status lab_run(const lab_config* cfg, const lab_run_options* opts);

/* Dataset round trip over the CSV wire format (header x0,...,y,flipped). */
LAB_API lab_status lab_dataset_from_csv(const char* path, lab_dataset** out);
LAB_API lab_status lab_dataset_to_csv(const lab_dataset* ds, const char* path);

/* Independent per-sample label flips with probability eta (binary data). */
LAB_API lab_status lab_dataset_inject_noise(const lab_dataset* ds, double eta, uint64_t seed,
                                            lab_dataset** out);

LAB_API size_t lab_dataset_size(const lab_dataset* ds);
LAB_API int lab_dataset_dim(const lab_dataset* ds);
LAB_API size_t lab_dataset_flipped_count(const lab_dataset* ds);
LAB_API void lab_dataset_close(lab_dataset* ds);

#ifdef __cplusplus
}
#endif

#endif /* LAB_LAB_H */
