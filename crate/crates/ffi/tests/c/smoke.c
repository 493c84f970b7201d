#include <math.h>
#include <stdio.h>
#include "ymh.h"

int main(void) {
    YmhConfig *cfg = NULL;
    if (ymh_config_template("taylor-green", &cfg) != YMH_STATUS_OK) {
        fprintf(stderr, "%s\n", ymh_last_error_message());
        return 1;
    }
    if (ymh_config_override(cfg, 0.01, 0, NULL) != YMH_STATUS_OK) return 1;

    YmhSimulation *sim = NULL;
    if (ymh_simulation_new(cfg, &sim) != YMH_STATUS_OK) return 1;
    YmhDiagnostics d0, d1;
    ymh_simulation_diagnostics(sim, &d0);
    if (ymh_simulation_step(sim, 10) != YMH_STATUS_OK) return 1;
    ymh_simulation_diagnostics(sim, &d1);
    printf("t=%.3f drift=%.3e\n", d1.t, fabs(d1.total - d0.total) / d0.total);

    if (ymh_config_parse("[grid]\ndim = 2\nresolution = 17\n", &cfg) != YMH_STATUS_CONFIG) return 1;
    printf("error: %s\n", ymh_last_error_message());

    ymh_simulation_free(sim);
    ymh_config_free(cfg);
    return fabs(d1.t - 0.1) < 1e-12 ? 0 : 1;
}
