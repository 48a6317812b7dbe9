#include <stdio.h>
#include "apso.h"

int main(void) {
    ApsoInstance *inst = NULL;
    if (apso_instance_parse("2 2\n0 3 1 2\n1 2 0 4\n", &inst) != APSO_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", apso_last_error());
        return 1;
    }
    ApsoParams params;
    apso_params_preset("apso", &params);
    ApsoSolveOptions options = apso_solve_options_default();
    options.n_particles = 10;
    options.n_iterations = 10;
    ApsoSchedule *schedule = NULL;
    if (apso_solve(inst, &params, &options, &schedule) != APSO_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", apso_last_error());
        return 1;
    }
    bool feasible = false;
    apso_schedule_is_feasible(schedule, inst, &feasible);
    printf("makespan %llu feasible %d\n",
           (unsigned long long)apso_schedule_makespan(schedule), (int)feasible);

    ApsoStatus bad = apso_instance_parse("1 1\nx\n", &inst);
    printf("status %d\n", (int)bad);

    apso_schedule_free(schedule);
    apso_instance_free(inst);
    return 0;
}
