import rospy
import smach


class NavigateToRoom(smach.State):
    """Drive into a room, stopping as soon as the base is inside its area."""

    def __init__(self, robot, room, area="in"):
        smach.State.__init__(self, outcomes=["arrived", "unreachable", "goal_not_defined"])
        self.robot = robot
        self.room = room
        self.area = area

    def execute(self, userdata=None):
        room = self.robot.ed.get_entity(self.room)
        if room is None or self.area not in room.volumes:
            rospy.logwarn("Room %s has no '%s' volume", self.room, self.area)
            return "goal_not_defined"
        constraint = room.volumes[self.area].as_constraint()
        plan = self.robot.base.global_planner.get_plan_to_constraint(constraint)
        if not plan or not self.robot.base.follow(plan):
            return "unreachable"
        return "arrived"
