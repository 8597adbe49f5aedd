import rospy
import smach


class _DecideNavigateState(smach.State):
    """Choose how to reach an area: as a waypoint, as a room, or not at all."""

    def __init__(self, robot, area):
        smach.State.__init__(self, outcomes=["waypoint", "room", "none"])
        self.robot = robot
        self.area = area

    def execute(self, userdata=None):
        entity = self.robot.ed.get_entity(self.area)
        if entity is None:
            rospy.logwarn("Area %s is unknown", self.area)
            return "none"
        if entity.is_a("waypoint"):
            return "waypoint"
        if entity.is_a("room"):
            return "room"
        return "none"
