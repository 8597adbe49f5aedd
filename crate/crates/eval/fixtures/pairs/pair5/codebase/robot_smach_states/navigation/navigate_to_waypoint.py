import rospy
import smach


class NavigateToWaypoint(smach.State):
    """Plan to a named waypoint from the world model and drive there."""

    def __init__(self, robot, waypoint, radius=0.15):
        smach.State.__init__(self, outcomes=["arrived", "unreachable", "goal_not_defined"])
        self.robot = robot
        self.waypoint = waypoint
        self.radius = radius

    def execute(self, userdata=None):
        entity = self.robot.ed.get_entity(self.waypoint)
        if entity is None:
            rospy.logwarn("Waypoint %s not in the world model", self.waypoint)
            return "goal_not_defined"
        plan = self.robot.base.global_planner.get_plan(entity.pose, self.radius)
        if not plan:
            return "unreachable"
        if not self.robot.base.follow(plan):
            return "unreachable"
        return "arrived"
