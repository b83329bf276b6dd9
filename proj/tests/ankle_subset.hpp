#pragma once

#include <string>
#include <vector>

// Reference 20-feature subset for the two-ankle gait setup.
inline const std::vector<std::string> kAnkleSubset{
    "accel_y_diff__agg_linear_trend__f_agg_\"max\"__chunk_len_5__attr_\"stderr\"",
    "accel_y_diff__change_quantiles__f_agg_\"var\"__isabs_True__qh_1.0__ql_0.0",
    "accel_y_r__agg_linear_trend__f_agg_\"min\"__chunk_len_10__attr_\"stderr\"",
    "accel_y_r__change_quantiles__f_agg_\"mean\"__isabs_True__qh_1.0__ql_0.0",
    "accel_y_r__change_quantiles__f_agg_\"var\"__isabs_False__qh_1.0__ql_0.2",
    "accel_y_r__change_quantiles__f_agg_\"var\"__isabs_False__qh_1.0__ql_0.4",
    "accel_z_diff__change_quantiles__f_agg_\"var\"__isabs_True__qh_1.0__ql_0.8",
    "accel_z_l__agg_linear_trend__f_agg_\"min\"__chunk_len_10__attr_\"stderr\"",
    "accel_z_l__change_quantiles__f_agg_\"var\"__isabs_False__qh_0.6__ql_0.0",
    "accel_z_r__minimum",
    "gyro_x_r__change_quantiles__f_agg_\"var\"__isabs_True__qh_0.4__ql_0.2",
    "gyro_y_diff__agg_linear_trend__f_agg_\"max\"__chunk_len_10__attr_\"stderr\"",
    "gyro_y_diff__agg_linear_trend__f_agg_\"max\"__chunk_len_50__attr_\"stderr\"",
    "gyro_y_diff__change_quantiles__f_agg_\"var\"__isabs_False__qh_1.0__ql_0.4",
    "gyro_y_diff__change_quantiles__f_agg_\"var\"__isabs_True__qh_1.0__ql_0.0",
    "gyro_y_l__change_quantiles__f_agg_\"var\"__isabs_True__qh_0.6__ql_0.4",
    "gyro_z_l__change_quantiles__f_agg_\"var\"__isabs_False__qh_0.6__ql_0.4",
    "gyro_z_r__change_quantiles__f_agg_\"mean\"__isabs_True__qh_0.6__ql_0.4",
    "gyro_z_r__change_quantiles__f_agg_\"mean\"__isabs_True__qh_0.8__ql_0.2",
    "gyro_z_r__change_quantiles__f_agg_\"var\"__isabs_False__qh_0.6__ql_0.0",
};
