//! Gripper placeholder.
