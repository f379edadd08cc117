/* Build from crates/ffi after `cargo build`:
 *   cc examples/solve.c -Iinclude -L../../target/debug -l:libroster_ffi.a -lpthread -ldl -lm -o solve */
#include <stdio.h>
#include "roster.h"

int main(void) {
    const char *json =
        "{\"units_per_week\": 10, \"workers\": 2, \"tasks\": ["
        "{\"id\": 1, \"start\": -3, \"end\": 4}, {\"id\": 2, \"start\": 5, \"end\": 9}]}";
    RosterInstance *inst = NULL;
    if (roster_instance_from_json(json, &inst) != ROSTER_STATUS_OK) {
        fprintf(stderr, "error: %s\n", roster_last_error());
        return 2;
    }
    RosterPlan *plan = NULL;
    RosterStatus status = roster_solve(inst, &plan);
    if (status != ROSTER_STATUS_OK) {
        printf("no balanced plan\n");
        roster_instance_free(inst);
        return 1;
    }
    uint32_t period = roster_plan_period(plan);
    for (uint32_t task = 1; task <= roster_instance_task_count(inst); task++) {
        printf("t%u:", task);
        for (uint32_t week = 1; week <= period; week++) {
            printf(" w%u", roster_plan_worker(plan, task, week));
        }
        printf("\n");
    }
    roster_plan_free(plan);
    roster_instance_free(inst);
    return 0;
}
